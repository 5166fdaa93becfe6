//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_NEURAL_H_
#define SYNROUTE_NEURAL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synroute/random.h"

namespace synroute::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation : std::uint8_t { kIdentity = 0, kGelu = 1, kSigmoid = 2 };

struct LayerSpec {
  int in = 0;
  int out = 0;
  Activation activation = Activation::kGelu;
  bool layer_norm = false;
};

// Shape of a stack: `layers` dense layers, the last mapping to `outputs`.
struct NetShape {
  int inputs = 0;
  int layers = 3;
  int width = 64;
  int outputs = 1;
  bool layer_norm = false;
  Activation hidden = Activation::kGelu;
  Activation output = Activation::kIdentity;

  std::vector<LayerSpec> specs() const;
};

// Columns of an input matrix are examples.
struct ForwardCache {
  std::vector<Matrix> inputs;      // per layer
  std::vector<Matrix> pre;         // W x + b
  std::vector<Matrix> normalized;  // LN output before scale/shift
  std::vector<Vector> inv_std;     // per column
  std::vector<Matrix> post_affine; // input to the activation
  Matrix output;
};

// Dense stack whose parameters live in one flat vector:
// per layer W (out x in, column-major), b, then gamma and beta when normalized.
class DenseNet {
public:
  DenseNet() = default;
  explicit DenseNet(std::vector<LayerSpec> specs);
  DenseNet(const NetShape &shape, Rng &rng);

  const std::vector<LayerSpec> &specs() const { return specs_; }
  int input_dim() const { return specs_.empty() ? 0 : specs_.front().in; }
  int output_dim() const { return specs_.empty() ? 0 : specs_.back().out; }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  Vector &params() { return params_; }
  const Vector &params() const { return params_; }

  // Scaled-normal initialization (std 1/sqrt(fan_in)); LN gamma = 1.
  void initialize(Rng &rng);

  Matrix apply(const Matrix &x) const;
  Matrix forward(const Matrix &x, ForwardCache &cache) const;
  // Gradient of sum(upstream .* output) with respect to params.
  Vector backward(const ForwardCache &cache, const Matrix &upstream) const;

  void write(std::ostream &out) const;
  static DenseNet read(std::istream &in);

private:
  struct Offsets {
    std::size_t w, b, gamma, beta;
  };
  std::vector<LayerSpec> specs_;
  std::vector<Offsets> offsets_;
  Vector params_;
};

double gelu(double x);
double gelu_grad(double x);
double sigmoid(double x);
double softplus(double x);

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
public:
  Adam(std::size_t n, const AdamConfig &cfg = {});
  // Throws Error{kNumeric} on a non-finite gradient.
  void step(Vector &params, const Vector &grads);
  std::int64_t steps() const { return t_; }

private:
  AdamConfig cfg_;
  Vector m_, v_;
  std::int64_t t_ = 0;
};

struct LossGrad {
  double loss = 0.0;
  Vector grad;  // w.r.t. the scores/logits
};

// Mean binary cross-entropy on logits.
LossGrad bce_with_logits(const Vector &logits, const Vector &labels);

// Mean over unordered pairs i < j of BCE(s_i - s_j, [t_i > t_j]); tied
// targets get `tie_label`.
LossGrad ranknet_loss(const Vector &scores, const Vector &targets, double tie_label = 0.5);

LossGrad mse_loss(const Vector &scores, const Vector &targets);

struct Correlation {
  double value = 0.0;
  bool degenerate = false;  // constant input; value forced to 0
};

// Pearson correlation of average ranks.
Correlation spearman(const std::vector<double> &xs, const std::vector<double> &ys);
std::vector<double> average_ranks(const std::vector<double> &xs);

// ---- neural additive model -------------------------------------------------

// score(B) = (alpha + (1 - alpha) / |B|) * sum_b s(b), alpha = sigmoid(raw).
class NamModel {
public:
  NamModel() = default;
  NamModel(DenseNet body, double alpha_raw = 0.0): body_(std::move(body)), alpha_raw_(alpha_raw) { }

  const DenseNet &body() const { return body_; }
  DenseNet &body() { return body_; }
  double alpha() const { return sigmoid(alpha_raw_); }
  double alpha_raw() const { return alpha_raw_; }
  void set_alpha_raw(double a) { alpha_raw_ = a; }

  // Per-block scores for fingerprint columns.
  Vector block_scores(const Matrix &fps) const;
  // Multiset aggregation of precomputed block scores.
  double combine(const std::vector<double> &scores) const;

  void write(std::ostream &out) const;
  static NamModel read(std::istream &in);

private:
  DenseNet body_;
  double alpha_raw_ = 0.0;
};

struct NamExample {
  std::vector<int> blocks;  // leaf block ids, multiset
  double target = 0.0;
};

enum class NamLoss { kRankNet, kMse };

struct NamTrainConfig {
  NetShape shape {0, 5, 64, 1, false, Activation::kGelu, Activation::kIdentity};
  AdamConfig adam;
  int batch_size = 50;
  int max_epochs = 200;
  int patience = 5;
  double validation_fraction = 0.1;
  NamLoss loss = NamLoss::kRankNet;
  double tie_label = 0.5;
  std::uint64_t seed = 0;
};

struct NamEpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_spearman = 0.0;
};

struct NamTrainResult {
  NamModel model;
  double best_validation_spearman = 0.0;
  int best_epoch = 0;
  bool skipped = false;  // degenerate targets
  std::vector<NamEpochLog> log;
};

// Loss and full gradient (body params then alpha_raw) for a batch.
// `fps` holds one fingerprint column per block id.
struct NamBatchGrad {
  double loss = 0.0;
  Vector body_grad;
  double alpha_grad = 0.0;
};
NamBatchGrad nam_batch_gradient(const NamModel &model, const Matrix &fps,
                                const std::vector<NamExample> &batch, NamLoss loss,
                                double tie_label);

std::vector<double> nam_predict(const NamModel &model, const Matrix &fps,
                                const std::vector<NamExample> &examples);

NamTrainResult train_nam(const std::vector<NamExample> &examples, const Matrix &fps,
                         const NamTrainConfig &cfg,
                         const std::function<void(const NamEpochLog &)> &on_epoch = {});

}  // namespace synroute::nn

#endif  // SYNROUTE_NEURAL_H_
