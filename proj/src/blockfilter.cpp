//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/blockfilter.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "synroute/chem/smiles.h"
#include "synroute/error.h"
#include "synroute/io.h"

namespace synroute {

std::vector<int> sim_filter(const chem::CountFingerprint &query, const Catalog &catalog,
                            double threshold) {
  std::vector<int> out;
  for (const auto &b : catalog.blocks()) {
    if (b.fp.dim != query.dim)
      throw Error(ErrorCode::kInvalidArgument, "query and block fingerprints differ in size");
    if (chem::containment(b.fp, query) > threshold) out.push_back(b.id);
  }
  return out;
}

// ---- dataset --------------------------------------------------------------

void RouteDataset::split(double heldout_fraction, std::uint64_t seed) {
  if (!(heldout_fraction >= 0 && heldout_fraction < 1))
    throw Error(ErrorCode::kInvalidArgument, "held-out fraction must lie in [0, 1)");
  std::vector<int> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x5350));
  shuffle(rng, order);
  auto n_held = static_cast<std::size_t>(
      std::llround(heldout_fraction * static_cast<double>(examples.size())));
  if (heldout_fraction > 0 && n_held == 0 && examples.size() >= 2) n_held = 1;
  heldout.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_held));
  train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_held), order.end());
  std::sort(heldout.begin(), heldout.end());
  std::sort(train.begin(), train.end());
}

void RouteDataset::write_jsonl(const std::filesystem::path &path) const {
  std::string out;
  for (const auto &e : examples) {
    nlohmann::json j {{"product", e.product.text}, {"blocks", e.blocks}};
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

RouteDataset RouteDataset::read_jsonl(const std::filesystem::path &path,
                                      const Catalog &catalog, double heldout_fraction,
                                      std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  RouteDataset ds;
  std::string line;
  int lineno = 0;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      RouteExample e;
      e.mol = std::make_shared<const chem::Molecule>(
          chem::parse_smiles(j.at("product").get<std::string>()));
      e.product = chem::canonical_key(*e.mol);
      e.blocks = j.at("blocks").get<std::vector<int>>();
      std::sort(e.blocks.begin(), e.blocks.end());
      e.blocks.erase(std::unique(e.blocks.begin(), e.blocks.end()), e.blocks.end());
      if (e.blocks.empty()) throw Error(ErrorCode::kParse, "example without blocks");
      for (int id : e.blocks)
        if (id < 0 || id >= catalog.size())
          throw Error(ErrorCode::kParse, "block id " + std::to_string(id) + " not in catalog");
      if (!seen.insert(e.product.text).second)
        throw Error(ErrorCode::kParse, "duplicate product " + e.product.text);
      ds.examples.push_back(std::move(e));
    } catch (const nlohmann::json::exception &ex) {
      throw Error(ErrorCode::kParse, where + ex.what());
    } catch (const Error &ex) {
      throw Error(ex.code(), where + ex.what());
    }
  }
  ds.split(heldout_fraction, seed);
  return ds;
}

RouteDataset generate_route_dataset(const Catalog &catalog, const DatasetOptions &opts,
                                    const TreeLimits &limits) {
  if (opts.n_products < 1) throw Error(ErrorCode::kInvalidArgument, "n_products must be >= 1");
  OpContext ctx {catalog, nullptr, limits, 10};
  Rng rng(derive_seed(opts.seed, 0x4453));
  const std::int64_t cap =
      opts.max_attempts > 0 ? opts.max_attempts : 200LL * opts.n_products;
  RouteDataset ds;
  std::unordered_set<std::string> seen;
  std::int64_t attempts = 0;
  while (static_cast<int>(ds.examples.size()) < opts.n_products) {
    if (attempts >= cap)
      throw Error(ErrorCode::kInvalidArgument,
                  "found only " + std::to_string(ds.examples.size()) + " unique products in "
                      + std::to_string(attempts) + " sampled routes");
    ++attempts;
    SynthesisTree t = sample_route(ctx, rng, opts.max_steps);
    if (!seen.insert(t.key().text).second) continue;
    RouteExample e;
    e.product = t.key();
    e.mol = t.root()->mol;
    e.blocks = t.leaves();
    std::sort(e.blocks.begin(), e.blocks.end());
    e.blocks.erase(std::unique(e.blocks.begin(), e.blocks.end()), e.blocks.end());
    ds.examples.push_back(std::move(e));
    if (opts.progress && opts.progress_every > 0
        && ds.examples.size() % static_cast<std::size_t>(opts.progress_every) == 0)
      opts.progress(static_cast<int>(ds.examples.size()), attempts);
  }
  ds.split(opts.heldout_fraction, opts.seed);
  return ds;
}

// ---- classifier -----------------------------------------------------------

Eigen::VectorXd dense_fingerprint(const chem::CountFingerprint &fp) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(fp.dim);
  for (const auto &[idx, count] : fp.entries) v[idx] = static_cast<double>(count);
  return v;
}

Eigen::MatrixXd block_fingerprint_matrix(const Catalog &catalog, int dim) {
  Eigen::MatrixXd m(dim, catalog.size());
  for (const auto &b : catalog.blocks()) {
    const chem::CountFingerprint fp =
        b.fp.dim == dim ? b.fp : chem::morgan_count_fp(*b.mol, chem::kMorganRadius, dim);
    m.col(b.id) = dense_fingerprint(fp);
  }
  return m;
}

Eigen::MatrixXd classifier_inputs(const Eigen::VectorXd &query, const Eigen::MatrixXd &blocks) {
  const auto d = query.size();
  if (blocks.rows() != d)
    throw Error(ErrorCode::kInvalidArgument, "query and block fingerprints differ in size");
  Eigen::MatrixXd x(3 * d, blocks.cols());
  x.topRows(d) = query.replicate(1, blocks.cols());
  x.middleRows(d, d) = blocks;
  x.bottomRows(d) = blocks.array().min(query.replicate(1, blocks.cols()).array()).matrix();
  return x;
}

nlohmann::json ClassifierConfig::to_json() const {
  return {{"fingerprint_dim", fingerprint_dim},
          {"layers", shape.layers},
          {"width", shape.width},
          {"layer_norm", shape.layer_norm},
          {"lr", adam.lr},
          {"steps", steps},
          {"batch_size", batch_size},
          {"hard_negatives", hard_negatives},
          {"hard_negative_rate", hard_negative_rate},
          {"neighbors", neighbors},
          {"seed", seed}};
}

ClassifierConfig ClassifierConfig::from_json(const nlohmann::json &j) {
  ClassifierConfig c;
  for (const auto &[key, value] : j.items()) {
    if (key == "fingerprint_dim") c.fingerprint_dim = value.get<int>();
    else if (key == "layers") c.shape.layers = value.get<int>();
    else if (key == "width") c.shape.width = value.get<int>();
    else if (key == "layer_norm") c.shape.layer_norm = value.get<bool>();
    else if (key == "lr") c.adam.lr = value.get<double>();
    else if (key == "steps") c.steps = value.get<int>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "hard_negatives") c.hard_negatives = value.get<bool>();
    else if (key == "hard_negative_rate") c.hard_negative_rate = value.get<double>();
    else if (key == "neighbors") c.neighbors = value.get<int>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw Error(ErrorCode::kInvalidArgument, "unknown classifier option '" + key + "'");
  }
  if (c.fingerprint_dim < 8 || c.steps < 0 || c.batch_size < 1 || c.neighbors < 1
      || !(c.hard_negative_rate >= 0 && c.hard_negative_rate <= 1))
    throw Error(ErrorCode::kInvalidArgument, "classifier option out of range");
  return c;
}

Eigen::VectorXd BlockClassifier::logits(const Eigen::VectorXd &query,
                                        const Eigen::MatrixXd &blocks) const {
  return net_.apply(classifier_inputs(query, blocks)).row(0).transpose();
}

Eigen::VectorXd BlockClassifier::score(const Eigen::VectorXd &query,
                                       const Eigen::MatrixXd &blocks) const {
  return logits(query, blocks).unaryExpr([](double z) { return nn::sigmoid(z); });
}

namespace {

constexpr char kModelMagic[8] = {'S', 'Y', 'N', 'R', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kModelVersion = 1;
enum : std::uint8_t { kKindClassifier = 1, kKindNam = 2 };

template <class T>
void put(std::ostream &out, T v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
T get(std::istream &in) {
  T v;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof(T)))
    throw Error(ErrorCode::kIo, "truncated model file");
  return v;
}

void write_header(std::ostream &out, std::uint8_t kind, int dim, const nlohmann::json &echo) {
  out.write(kModelMagic, sizeof kModelMagic);
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint8_t>(out, kind);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  const std::string text = echo.is_null() ? "{}" : echo.dump();
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

int read_header(std::istream &in, std::uint8_t kind, const std::string &path) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    throw Error(ErrorCode::kIo, path + " is not a model file");
  if (get<std::uint32_t>(in) != kModelVersion)
    throw Error(ErrorCode::kIo, path + " has an unsupported model version");
  if (get<std::uint8_t>(in) != kind) throw Error(ErrorCode::kIo, path + " holds another model kind");
  const int dim = static_cast<int>(get<std::uint32_t>(in));
  const auto len = get<std::uint64_t>(in);
  if (len > (1u << 24)) throw Error(ErrorCode::kIo, path + " has a corrupt header");
  std::string skip(len, '\0');
  if (!in.read(skip.data(), static_cast<std::streamsize>(len)))
    throw Error(ErrorCode::kIo, "truncated model file");
  return dim;
}

}  // namespace

void BlockClassifier::save(const std::filesystem::path &path,
                           const nlohmann::json &config_echo) const {
  std::ostringstream out;
  write_header(out, kKindClassifier, dim_, config_echo);
  net_.write(out);
  write_file_atomic(path, out.str());
}

BlockClassifier BlockClassifier::load(const std::filesystem::path &path) {
  std::istringstream in(read_file(path));
  const int dim = read_header(in, kKindClassifier, path.string());
  nn::DenseNet net = nn::DenseNet::read(in);
  if (net.input_dim() != 3 * dim || net.output_dim() != 1)
    throw Error(ErrorCode::kIo, path.string() + ": network shape does not match its header");
  return BlockClassifier(std::move(net), dim);
}

void save_nam(const nn::NamModel &nam, int fingerprint_dim, const std::filesystem::path &path,
              const nlohmann::json &config_echo) {
  std::ostringstream out;
  write_header(out, kKindNam, fingerprint_dim, config_echo);
  nam.write(out);
  write_file_atomic(path, out.str());
}

nn::NamModel load_nam(const std::filesystem::path &path, int *fingerprint_dim) {
  std::istringstream in(read_file(path));
  const int dim = read_header(in, kKindNam, path.string());
  nn::NamModel m = nn::NamModel::read(in);
  if (m.body().input_dim() != dim)
    throw Error(ErrorCode::kIo, path.string() + ": network shape does not match its header");
  if (fingerprint_dim) *fingerprint_dim = dim;
  return m;
}

double auroc(const std::vector<double> &scores, const std::vector<int> &labels) {
  const auto ranks = nn::average_ranks(scores);
  double pos = 0, neg = 0, rank_sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      ++pos;
      rank_sum += ranks[i];
    } else {
      ++neg;
    }
  }
  if (pos == 0 || neg == 0) throw Error(ErrorCode::kInvalidArgument, "AUROC needs both classes");
  return (rank_sum - pos * (pos + 1) / 2) / (pos * neg);
}

double average_precision(const std::vector<double> &scores, const std::vector<int> &labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0, total = 0;
  const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (pos == 0) throw Error(ErrorCode::kInvalidArgument, "AUPRC needs a positive");
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (!labels[order[r]]) continue;
    ++hits;
    total += hits / static_cast<double>(r + 1);
  }
  return total / pos;
}

RankingMetrics evaluate_classifier(const BlockClassifier &model, const RouteDataset &ds,
                                   const Catalog &catalog, const std::vector<int> &examples) {
  const Eigen::MatrixXd blocks = block_fingerprint_matrix(catalog, model.fingerprint_dim());
  RankingMetrics m;
  for (int idx : examples) {
    const RouteExample &e = ds.examples.at(idx);
    const Eigen::VectorXd q = dense_fingerprint(
        chem::morgan_count_fp(*e.mol, chem::kMorganRadius, model.fingerprint_dim()));
    const Eigen::VectorXd s = model.logits(q, blocks);
    std::vector<double> scores(s.data(), s.data() + s.size());
    std::vector<int> labels(catalog.size(), 0);
    for (int id : e.blocks) labels[id] = 1;
    if (static_cast<int>(e.blocks.size()) == catalog.size()) continue;
    m.auroc += auroc(scores, labels);
    m.auprc += average_precision(scores, labels);
    ++m.examples;
  }
  if (m.examples > 0) {
    m.auroc /= m.examples;
    m.auprc /= m.examples;
  }
  return m;
}

PairSampler::PairSampler(const RouteDataset &ds, const Catalog &catalog,
                         const ClassifierConfig &cfg)
    : ds_(ds), n_blocks_(catalog.size()), hard_(cfg.hard_negatives),
      hard_rate_(cfg.hard_negative_rate) {
  if (ds.train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training split");
  if (hard_) neighbors_ = mine_neighbors(catalog, cfg.neighbors);
}

PairSampler::Draw PairSampler::draw(Rng &rng) const {
  Draw d;
  d.example = ds_.train[uniform_index(rng, ds_.train.size())];
  const auto &pos = ds_.examples[d.example].blocks;
  const bool has_negative = static_cast<int>(pos.size()) < n_blocks_;
  if (bernoulli(rng, 0.5) || !has_negative) {
    d.block = pos[uniform_index(rng, pos.size())];
    d.label = 1.0;
    return d;
  }
  if (hard_ && bernoulli(rng, hard_rate_)) {
    const int anchor = pos[uniform_index(rng, pos.size())];
    std::vector<int> pool;
    for (int id : neighbors_[anchor])
      if (!std::binary_search(pos.begin(), pos.end(), id)) pool.push_back(id);
    if (!pool.empty()) {
      d.block = pool[uniform_index(rng, pool.size())];
      d.hard = true;
      return d;
    }
  }
  do d.block = static_cast<int>(uniform_index(rng, n_blocks_));
  while (std::binary_search(pos.begin(), pos.end(), d.block));
  return d;
}

ClassifierTrainResult train_block_classifier(
    const RouteDataset &ds, const Catalog &catalog, const ClassifierConfig &cfg,
    const std::function<void(const ClassifierLog &)> &on_log) {
  if (ds.train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training split");
  if (ds.heldout.empty()) throw Error(ErrorCode::kInvalidArgument, "empty held-out split");
  if (catalog.size() < 2) throw Error(ErrorCode::kInvalidArgument, "catalog too small");
  const int d = cfg.fingerprint_dim;
  Rng rng(derive_seed(cfg.seed, 0x434c));
  nn::NetShape shape = cfg.shape;
  shape.inputs = 3 * d;
  shape.outputs = 1;
  BlockClassifier model(nn::DenseNet(shape, rng), d);

  const Eigen::MatrixXd blocks = block_fingerprint_matrix(catalog, d);
  Eigen::MatrixXd queries(d, static_cast<Eigen::Index>(ds.examples.size()));
  for (int idx : ds.train)
    queries.col(idx) = dense_fingerprint(chem::morgan_count_fp(*ds.examples[idx].mol,
                                                                chem::kMorganRadius, d));
  const PairSampler sampler(ds, catalog, cfg);

  nn::Adam adam(model.net().num_params(), cfg.adam);
  ClassifierTrainResult result;
  double loss_acc = 0;
  int loss_n = 0;
  const Eigen::Index dd = d;
  for (int step = 1; step <= cfg.steps; ++step) {
    Eigen::MatrixXd x(3 * dd, cfg.batch_size);
    Eigen::VectorXd y(cfg.batch_size);
    for (int b = 0; b < cfg.batch_size; ++b) {
      const PairSampler::Draw dr = sampler.draw(rng);
      const int idx = dr.example;
      const auto q = queries.col(idx);
      const auto bb = blocks.col(dr.block);
      x.col(b).head(dd) = q;
      x.col(b).segment(dd, dd) = bb;
      x.col(b).tail(dd) = q.cwiseMin(bb);
      y[b] = dr.label;
    }
    nn::ForwardCache cache;
    const Eigen::MatrixXd out = model.net().forward(x, cache);
    const nn::LossGrad lg = nn::bce_with_logits(out.row(0).transpose(), y);
    if (!std::isfinite(lg.loss))
      throw Error(ErrorCode::kNumeric,
                  "non-finite classifier loss at step " + std::to_string(step));
    adam.step(model.net().params(), model.net().backward(cache, lg.grad.transpose()));
    loss_acc += lg.loss;
    ++loss_n;
    if (cfg.log_every > 0 && (step % cfg.log_every == 0 || step == cfg.steps)) {
      ClassifierLog log {step, loss_acc / loss_n};
      result.log.push_back(log);
      if (on_log) on_log(log);
      loss_acc = 0;
      loss_n = 0;
    }
  }
  result.heldout = evaluate_classifier(model, ds, catalog, ds.heldout);
  result.model = std::move(model);
  return result;
}

std::vector<int> classifier_filter(const BlockClassifier &model, const chem::Molecule &query,
                                   const Catalog &catalog, double mu) {
  const Eigen::MatrixXd blocks = block_fingerprint_matrix(catalog, model.fingerprint_dim());
  const Eigen::VectorXd q = dense_fingerprint(
      chem::morgan_count_fp(query, chem::kMorganRadius, model.fingerprint_dim()));
  const Eigen::VectorXd s = model.score(q, blocks);
  std::vector<int> out;
  for (int id = 0; id < catalog.size(); ++id)
    if (s[id] > mu) out.push_back(id);
  return out;
}

std::vector<std::vector<int>> mine_neighbors(const Catalog &catalog, int k) {
  const int n = catalog.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      sim[i][j] = sim[j][i] = chem::tanimoto(catalog.block(i).fp, catalog.block(j).fp);
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), others.size());
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take),
                      others.end(), [&](int a, int b) {
                        if (sim[i][a] != sim[i][b]) return sim[i][a] > sim[i][b];
                        return a < b;
                      });
    others.resize(take);
    out[i] = std::move(others);
  }
  return out;
}

std::vector<int> nam_top_k_filter(const nn::NamModel &nam, const Eigen::MatrixXd &block_fps,
                                  int k) {
  const Eigen::VectorXd s = nam.block_scores(block_fps);
  std::vector<int> ids(static_cast<std::size_t>(s.size()));
  std::iota(ids.begin(), ids.end(), 0);
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    [&](int a, int b) {
                      if (s[a] != s[b]) return s[a] > s[b];
                      return a < b;
                    });
  ids.resize(take);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace synroute
