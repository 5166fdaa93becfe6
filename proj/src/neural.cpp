//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/neural.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "synroute/error.h"

namespace synroute::nn {
namespace {

constexpr double kLayerNormEps = 1e-5;

template <class T>
void put(std::ostream &out, T v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
T get(std::istream &in) {
  T v;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof(T)))
    throw Error(ErrorCode::kIo, "truncated model data");
  return v;
}

double activate(Activation a, double x) {
  switch (a) {
  case Activation::kGelu:
    return gelu(x);
  case Activation::kSigmoid:
    return sigmoid(x);
  case Activation::kIdentity:
    break;
  }
  return x;
}

double activate_grad(Activation a, double x) {
  switch (a) {
  case Activation::kGelu:
    return gelu_grad(x);
  case Activation::kSigmoid: {
    const double s = sigmoid(x);
    return s * (1 - s);
  }
  case Activation::kIdentity:
    break;
  }
  return 1.0;
}

}  // namespace

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return cdf + x * pdf;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

std::vector<LayerSpec> NetShape::specs() const {
  if (inputs < 1 || layers < 1 || width < 1 || outputs < 1)
    throw Error(ErrorCode::kInvalidArgument, "network dimensions must be positive");
  std::vector<LayerSpec> out;
  int in = inputs;
  for (int l = 0; l < layers; ++l) {
    const bool last = l + 1 == layers;
    out.push_back({in, last ? outputs : width, last ? output : hidden, !last && layer_norm});
    in = width;
  }
  return out;
}

DenseNet::DenseNet(std::vector<LayerSpec> specs): specs_(std::move(specs)) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < specs_.size(); ++l) {
    const auto &s = specs_[l];
    if (s.in < 1 || s.out < 1)
      throw Error(ErrorCode::kInvalidArgument, "layer dimensions must be positive");
    if (l > 0 && specs_[l - 1].out != s.in)
      throw Error(ErrorCode::kInvalidArgument, "layer dimensions do not chain");
    Offsets o;
    o.w = n;
    n += static_cast<std::size_t>(s.in) * s.out;
    o.b = n;
    n += s.out;
    o.gamma = o.beta = n;
    if (s.layer_norm) {
      o.gamma = n;
      n += s.out;
      o.beta = n;
      n += s.out;
    }
    offsets_.push_back(o);
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(n));
}

DenseNet::DenseNet(const NetShape &shape, Rng &rng): DenseNet(shape.specs()) {
  initialize(rng);
}

void DenseNet::initialize(Rng &rng) {
  params_.setZero();
  for (std::size_t l = 0; l < specs_.size(); ++l) {
    const auto &s = specs_[l];
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.in));
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.in) * s.out; ++i)
      params_[offsets_[l].w + i] = scale * standard_normal(rng);
    if (s.layer_norm)
      params_.segment(offsets_[l].gamma, s.out).setOnes();
  }
}

Matrix DenseNet::apply(const Matrix &x) const {
  ForwardCache cache;
  return forward(x, cache);
}

Matrix DenseNet::forward(const Matrix &x, ForwardCache &cache) const {
  if (x.rows() != input_dim())
    throw Error(ErrorCode::kInvalidArgument,
                "input has " + std::to_string(x.rows()) + " rows, network expects "
                    + std::to_string(input_dim()));
  if (!x.allFinite()) throw Error(ErrorCode::kNumeric, "non-finite network input");
  cache = ForwardCache {};
  Matrix h = x;
  for (std::size_t l = 0; l < specs_.size(); ++l) {
    const auto &s = specs_[l];
    const auto &o = offsets_[l];
    Eigen::Map<const Matrix> w(params_.data() + o.w, s.out, s.in);
    Eigen::Map<const Vector> b(params_.data() + o.b, s.out);
    cache.inputs.push_back(h);
    Matrix z = (w * h).colwise() + b;
    cache.pre.push_back(z);
    if (s.layer_norm) {
      Eigen::Map<const Vector> gamma(params_.data() + o.gamma, s.out);
      Eigen::Map<const Vector> beta(params_.data() + o.beta, s.out);
      Matrix xhat(z.rows(), z.cols());
      Vector inv(z.cols());
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double mean = z.col(c).mean();
        const double var = (z.col(c).array() - mean).square().mean();
        inv[c] = 1.0 / std::sqrt(var + kLayerNormEps);
        xhat.col(c) = (z.col(c).array() - mean) * inv[c];
      }
      cache.normalized.push_back(xhat);
      cache.inv_std.push_back(inv);
      z = (xhat.array().colwise() * gamma.array()).colwise() + beta.array();
    } else {
      cache.normalized.emplace_back();
      cache.inv_std.emplace_back();
    }
    cache.post_affine.push_back(z);
    h = z.unaryExpr([a = s.activation](double v) { return activate(a, v); });
  }
  cache.output = h;
  return h;
}

Vector DenseNet::backward(const ForwardCache &cache, const Matrix &upstream) const {
  Vector grad = Vector::Zero(params_.size());
  Matrix delta = upstream;
  for (std::size_t l = specs_.size(); l-- > 0;) {
    const auto &s = specs_[l];
    const auto &o = offsets_[l];
    const Matrix &a = cache.post_affine[l];
    Matrix dz = delta.array() * a.unaryExpr([act = s.activation](double v) {
                                   return activate_grad(act, v);
                                 }).array();
    if (s.layer_norm) {
      Eigen::Map<const Vector> gamma(params_.data() + o.gamma, s.out);
      const Matrix &xhat = cache.normalized[l];
      grad.segment(o.gamma, s.out) += (dz.array() * xhat.array()).rowwise().sum().matrix();
      grad.segment(o.beta, s.out) += dz.rowwise().sum();
      Matrix dxhat = dz.array().colwise() * gamma.array();
      for (Eigen::Index c = 0; c < dz.cols(); ++c) {
        const double m1 = dxhat.col(c).mean();
        const double m2 = (dxhat.col(c).array() * xhat.col(c).array()).mean();
        dz.col(c) = cache.inv_std[l][c]
                    * (dxhat.col(c).array() - m1 - xhat.col(c).array() * m2).matrix();
      }
    }
    Eigen::Map<Matrix> gw(grad.data() + o.w, s.out, s.in);
    gw += dz * cache.inputs[l].transpose();
    grad.segment(o.b, s.out) += dz.rowwise().sum();
    if (l > 0) {
      Eigen::Map<const Matrix> w(params_.data() + o.w, s.out, s.in);
      delta = w.transpose() * dz;
    }
  }
  return grad;
}

void DenseNet::write(std::ostream &out) const {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(specs_.size()));
  for (const auto &s : specs_) {
    put<std::int32_t>(out, s.in);
    put<std::int32_t>(out, s.out);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(s.activation));
    put<std::uint8_t>(out, s.layer_norm ? 1 : 0);
  }
  put<std::uint64_t>(out, static_cast<std::uint64_t>(params_.size()));
  out.write(reinterpret_cast<const char *>(params_.data()),
            static_cast<std::streamsize>(params_.size() * sizeof(double)));
}

DenseNet DenseNet::read(std::istream &in) {
  const auto n_layers = get<std::uint32_t>(in);
  if (n_layers == 0 || n_layers > 64) throw Error(ErrorCode::kIo, "bad layer count in model");
  std::vector<LayerSpec> specs;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    LayerSpec s;
    s.in = get<std::int32_t>(in);
    s.out = get<std::int32_t>(in);
    const auto act = get<std::uint8_t>(in);
    if (act > 2) throw Error(ErrorCode::kIo, "unknown activation in model");
    s.activation = static_cast<Activation>(act);
    s.layer_norm = get<std::uint8_t>(in) != 0;
    specs.push_back(s);
  }
  DenseNet net(std::move(specs));
  const auto n = get<std::uint64_t>(in);
  if (n != net.num_params()) throw Error(ErrorCode::kIo, "parameter count mismatch in model");
  if (!in.read(reinterpret_cast<char *>(net.params_.data()),
               static_cast<std::streamsize>(n * sizeof(double))))
    throw Error(ErrorCode::kIo, "truncated model parameters");
  return net;
}

// ---- optimizer ------------------------------------------------------------

Adam::Adam(std::size_t n, const AdamConfig &cfg)
    : cfg_(cfg), m_(Vector::Zero(static_cast<Eigen::Index>(n))),
      v_(Vector::Zero(static_cast<Eigen::Index>(n))) { }

void Adam::step(Vector &params, const Vector &grads) {
  if (grads.size() != m_.size() || params.size() != m_.size())
    throw Error(ErrorCode::kInvalidArgument, "optimizer shape mismatch");
  if (!grads.allFinite()) throw Error(ErrorCode::kNumeric, "non-finite gradient");
  ++t_;
  m_ = cfg_.beta1 * m_ + (1 - cfg_.beta1) * grads;
  v_ = cfg_.beta2 * v_ + (1 - cfg_.beta2) * grads.cwiseAbs2();
  const double c1 = 1 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -=
      cfg_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
}

// ---- losses ---------------------------------------------------------------

LossGrad bce_with_logits(const Vector &logits, const Vector &labels) {
  if (logits.size() != labels.size() || logits.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "BCE needs equal, nonempty inputs");
  LossGrad out;
  out.grad.resize(logits.size());
  const double n = static_cast<double>(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double z = logits[i], y = labels[i];
    out.loss += softplus(z) - y * z;
    out.grad[i] = (sigmoid(z) - y) / n;
  }
  out.loss /= n;
  return out;
}

LossGrad ranknet_loss(const Vector &scores, const Vector &targets, double tie_label) {
  if (scores.size() != targets.size())
    throw Error(ErrorCode::kInvalidArgument, "RankNet needs equal-length inputs");
  LossGrad out;
  out.grad = Vector::Zero(scores.size());
  const Eigen::Index n = scores.size();
  const double pairs = static_cast<double>(n) * (n - 1) / 2;
  if (pairs == 0) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = scores[i] - scores[j];
      const double y = targets[i] > targets[j] ? 1.0 : targets[i] < targets[j] ? 0.0 : tie_label;
      out.loss += softplus(d) - y * d;
      const double g = (sigmoid(d) - y) / pairs;
      out.grad[i] += g;
      out.grad[j] -= g;
    }
  }
  out.loss /= pairs;
  return out;
}

LossGrad mse_loss(const Vector &scores, const Vector &targets) {
  if (scores.size() != targets.size() || scores.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "MSE needs equal, nonempty inputs");
  const Vector diff = scores - targets;
  const double n = static_cast<double>(scores.size());
  return {diff.squaredNorm() / n, 2.0 * diff / n};
}

std::vector<double> average_ranks(const std::vector<double> &xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(const std::vector<double> &xs, const std::vector<double> &ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorCode::kInvalidArgument, "spearman needs two equal-length series of length >= 2");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

// ---- NAM ------------------------------------------------------------------

Vector NamModel::block_scores(const Matrix &fps) const {
  return body_.apply(fps).row(0).transpose();
}

double NamModel::combine(const std::vector<double> &scores) const {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "NAM score of an empty block set");
  const double a = alpha();
  const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
  return (a + (1.0 - a) / static_cast<double>(scores.size())) * sum;
}

void NamModel::write(std::ostream &out) const {
  put<double>(out, alpha_raw_);
  body_.write(out);
}

NamModel NamModel::read(std::istream &in) {
  const double a = get<double>(in);
  return NamModel(DenseNet::read(in), a);
}

namespace {

struct BatchBlocks {
  std::vector<int> ids;        // unique ids in the batch
  std::map<int, int> column;   // id -> column
  Matrix fps;
};

BatchBlocks gather(const Matrix &fps, const std::vector<NamExample> &batch) {
  BatchBlocks b;
  for (const auto &e : batch)
    for (int id : e.blocks)
      if (b.column.emplace(id, static_cast<int>(b.ids.size())).second) b.ids.push_back(id);
  b.fps.resize(fps.rows(), static_cast<Eigen::Index>(b.ids.size()));
  for (std::size_t k = 0; k < b.ids.size(); ++k) {
    if (b.ids[k] < 0 || b.ids[k] >= fps.cols())
      throw Error(ErrorCode::kInvalidArgument, "block id outside the fingerprint table");
    b.fps.col(static_cast<Eigen::Index>(k)) = fps.col(b.ids[k]);
  }
  return b;
}

}  // namespace

NamBatchGrad nam_batch_gradient(const NamModel &model, const Matrix &fps,
                                const std::vector<NamExample> &batch, NamLoss loss,
                                double tie_label) {
  for (const auto &e : batch)
    if (e.blocks.empty()) throw Error(ErrorCode::kInvalidArgument, "example without blocks");
  const BatchBlocks bb = gather(fps, batch);
  ForwardCache cache;
  const Matrix s = model.body().forward(bb.fps, cache);
  const double a = model.alpha();

  const auto n = static_cast<Eigen::Index>(batch.size());
  Vector scores(n), targets(n), sums(n), coef(n);
  for (Eigen::Index e = 0; e < n; ++e) {
    const auto &ex = batch[e];
    double sum = 0;
    for (int id : ex.blocks) sum += s(0, bb.column.at(id));
    const double m = static_cast<double>(ex.blocks.size());
    sums[e] = sum;
    coef[e] = a + (1 - a) / m;
    scores[e] = coef[e] * sum;
    targets[e] = ex.target;
  }
  const LossGrad lg = loss == NamLoss::kRankNet ? ranknet_loss(scores, targets, tie_label)
                                                : mse_loss(scores, targets);
  NamBatchGrad out;
  out.loss = lg.loss;
  Matrix upstream = Matrix::Zero(1, bb.fps.cols());
  for (Eigen::Index e = 0; e < n; ++e) {
    const auto &ex = batch[e];
    for (int id : ex.blocks) upstream(0, bb.column.at(id)) += lg.grad[e] * coef[e];
    const double m = static_cast<double>(ex.blocks.size());
    out.alpha_grad += lg.grad[e] * (1 - 1 / m) * sums[e];
  }
  out.alpha_grad *= a * (1 - a);
  out.body_grad = model.body().backward(cache, upstream);
  return out;
}

std::vector<double> nam_predict(const NamModel &model, const Matrix &fps,
                                const std::vector<NamExample> &examples) {
  const BatchBlocks bb = gather(fps, examples);
  std::vector<double> out;
  if (bb.ids.empty()) return std::vector<double>(examples.size(), 0.0);
  const Vector s = model.block_scores(bb.fps);
  for (const auto &e : examples) {
    std::vector<double> parts;
    for (int id : e.blocks) parts.push_back(s[bb.column.at(id)]);
    out.push_back(model.combine(parts));
  }
  return out;
}

NamTrainResult train_nam(const std::vector<NamExample> &examples, const Matrix &fps,
                         const NamTrainConfig &cfg,
                         const std::function<void(const NamEpochLog &)> &on_epoch) {
  if (examples.size() < 2)
    throw Error(ErrorCode::kInvalidArgument, "NAM training needs at least two examples");
  if (cfg.batch_size < 2) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 2");
  Rng rng(derive_seed(cfg.seed, 0x4e414d));
  NetShape shape = cfg.shape;
  shape.inputs = static_cast<int>(fps.rows());
  NamTrainResult result;
  result.model = NamModel(DenseNet(shape, rng), 0.0);

  bool constant = true;
  for (const auto &e : examples) constant &= e.target == examples.front().target;
  if (constant) {
    result.skipped = true;
    return result;
  }

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(rng, order);
  std::size_t n_val = static_cast<std::size_t>(
      std::llround(cfg.validation_fraction * static_cast<double>(examples.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, examples.size() - 1);
  std::vector<NamExample> train, val;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_val ? val : train).push_back(examples[order[i]]);
  // Too few held-out examples to rank: score on the training split instead.
  const std::vector<NamExample> &scored = val.size() >= 2 ? val : train;
  std::vector<double> scored_targets;
  for (const auto &e : scored) scored_targets.push_back(e.target);

  auto validation = [&](const NamModel &m) {
    if (scored.size() < 2) return 0.0;
    return spearman(nam_predict(m, fps, scored), scored_targets).value;
  };

  NamModel model = result.model;
  const std::size_t nb = model.body().num_params();
  Vector theta(static_cast<Eigen::Index>(nb + 1));
  Adam adam(nb + 1, cfg.adam);
  result.best_validation_spearman = validation(model);
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(rng, train);
    double loss_sum = 0;
    int batches = 0;
    for (std::size_t start = 0; start < train.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(train.size(), start + cfg.batch_size);
      if (end - start < 2 && cfg.loss == NamLoss::kRankNet) continue;
      std::vector<NamExample> batch(train.begin() + start, train.begin() + end);
      const NamBatchGrad g = nam_batch_gradient(model, fps, batch, cfg.loss, cfg.tie_label);
      if (!std::isfinite(g.loss))
        throw Error(ErrorCode::kNumeric, "non-finite NAM loss at epoch " + std::to_string(epoch));
      theta.head(nb) = model.body().params();
      theta[nb] = model.alpha_raw();
      Vector grad(theta.size());
      grad.head(nb) = g.body_grad;
      grad[nb] = g.alpha_grad;
      adam.step(theta, grad);
      model.body().params() = theta.head(nb);
      model.set_alpha_raw(theta[nb]);
      loss_sum += g.loss;
      ++batches;
    }
    NamEpochLog log {epoch, batches ? loss_sum / batches : 0.0, validation(model)};
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (log.validation_spearman > result.best_validation_spearman || result.best_epoch == 0) {
      result.best_validation_spearman = log.validation_spearman;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace synroute::nn
