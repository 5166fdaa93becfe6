//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_BLOCKFILTER_H_
#define SYNROUTE_BLOCKFILTER_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "synroute/catalog.h"
#include "synroute/filter.h"
#include "synroute/neural.h"
#include "synroute/synthesis.h"

namespace synroute {

// Blocks whose containment ||min(b, q)|| / ||b|| in the query exceeds the
// threshold (strictly).
std::vector<int> sim_filter(const chem::CountFingerprint &query, const Catalog &catalog,
                            double threshold = 0.5);

// ---- route dataset --------------------------------------------------------

struct RouteExample {
  chem::CanonicalKey product;
  chem::MolPtr mol;
  std::vector<int> blocks;  // sorted, unique
};

struct RouteDataset {
  std::vector<RouteExample> examples;
  std::vector<int> heldout;  // example indices, sorted
  std::vector<int> train;    // the rest

  void write_jsonl(const std::filesystem::path &path) const;
  static RouteDataset read_jsonl(const std::filesystem::path &path, const Catalog &catalog,
                                 double heldout_fraction = 0.1, std::uint64_t seed = 0);
  void split(double heldout_fraction, std::uint64_t seed);
};

struct DatasetOptions {
  int n_products = 5000;
  double heldout_fraction = 0.1;
  int max_steps = 5;
  std::uint64_t seed = 0;
  // Called every `progress_every` new products with (found, attempts).
  std::function<void(int, std::int64_t)> progress;
  int progress_every = 1000;
  std::int64_t max_attempts = 0;  // 0 = 200 * n_products
};

RouteDataset generate_route_dataset(const Catalog &catalog, const DatasetOptions &opts,
                                    const TreeLimits &limits = {});

// ---- block classifier -----------------------------------------------------

Eigen::VectorXd dense_fingerprint(const chem::CountFingerprint &fp);
// Fingerprints of all blocks at `dim`, one column per block id.
Eigen::MatrixXd block_fingerprint_matrix(const Catalog &catalog, int dim);

struct ClassifierConfig {
  int fingerprint_dim = 512;
  nn::NetShape shape {0, 3, 64, 1, true, nn::Activation::kGelu, nn::Activation::kIdentity};
  nn::AdamConfig adam;
  int steps = 3000;
  int batch_size = 64;
  bool hard_negatives = false;
  double hard_negative_rate = 0.5;
  int neighbors = 100;
  int log_every = 100;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ClassifierConfig from_json(const nlohmann::json &j);
};

class BlockClassifier {
public:
  BlockClassifier() = default;
  BlockClassifier(nn::DenseNet net, int fingerprint_dim)
      : net_(std::move(net)), dim_(fingerprint_dim) { }

  int fingerprint_dim() const { return dim_; }
  const nn::DenseNet &net() const { return net_; }
  nn::DenseNet &net() { return net_; }

  // Probabilities for one query against block columns.
  Eigen::VectorXd score(const Eigen::VectorXd &query, const Eigen::MatrixXd &blocks) const;
  Eigen::VectorXd logits(const Eigen::VectorXd &query, const Eigen::MatrixXd &blocks) const;

  void save(const std::filesystem::path &path, const nlohmann::json &config_echo = {}) const;
  static BlockClassifier load(const std::filesystem::path &path);

private:
  nn::DenseNet net_;
  int dim_ = 0;
};

// [q, b, min(q, b)] columns for one query.
Eigen::MatrixXd classifier_inputs(const Eigen::VectorXd &query, const Eigen::MatrixXd &blocks);

struct RankingMetrics {
  double auroc = 0.0;
  double auprc = 0.0;
  int examples = 0;  // examples with both classes present
};

// Per-list metrics; ties in score get average ranks for AUROC.
double auroc(const std::vector<double> &scores, const std::vector<int> &labels);
double average_precision(const std::vector<double> &scores, const std::vector<int> &labels);

RankingMetrics evaluate_classifier(const BlockClassifier &model, const RouteDataset &ds,
                                   const Catalog &catalog, const std::vector<int> &examples);

// Per-step training pairs: an example, then with probability 1/2 one of its
// blocks (label 1), else a negative drawn uniformly from the rest of the
// catalog or, in hard-negative mode, from neighbors of a positive.
class PairSampler {
public:
  struct Draw {
    int example = 0;
    int block = 0;
    double label = 0.0;
    bool hard = false;
  };

  PairSampler(const RouteDataset &ds, const Catalog &catalog, const ClassifierConfig &cfg);
  Draw draw(Rng &rng) const;

private:
  const RouteDataset &ds_;
  int n_blocks_;
  bool hard_;
  double hard_rate_;
  std::vector<std::vector<int>> neighbors_;
};

struct ClassifierLog {
  int step = 0;
  double loss = 0.0;
};

struct ClassifierTrainResult {
  BlockClassifier model;
  RankingMetrics heldout;
  std::vector<ClassifierLog> log;
};

ClassifierTrainResult train_block_classifier(
    const RouteDataset &ds, const Catalog &catalog, const ClassifierConfig &cfg,
    const std::function<void(const ClassifierLog &)> &on_log = {});

std::vector<int> classifier_filter(const BlockClassifier &model, const chem::Molecule &query,
                                   const Catalog &catalog, double mu = 0.5);

// k most Tanimoto-similar other blocks per block, ties by id.
std::vector<std::vector<int>> mine_neighbors(const Catalog &catalog, int k = 100);

// ---- NAM top-k ------------------------------------------------------------

// The k highest-scoring blocks under the NAM body, ties by id; sorted ids.
std::vector<int> nam_top_k_filter(const nn::NamModel &nam, const Eigen::MatrixXd &block_fps,
                                  int k = 1000);

void save_nam(const nn::NamModel &nam, int fingerprint_dim, const std::filesystem::path &path,
              const nlohmann::json &config_echo = {});
nn::NamModel load_nam(const std::filesystem::path &path, int *fingerprint_dim = nullptr);

}  // namespace synroute

#endif  // SYNROUTE_BLOCKFILTER_H_
