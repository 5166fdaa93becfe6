//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_SURROGATE_H_
#define SYNROUTE_SURROGATE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "synroute/chem/fingerprint.h"
#include "synroute/genetic.h"
#include "synroute/neural.h"

namespace synroute {

// Tanimoto on count vectors times the signal variance; 0 when both are empty.
double minmax_kernel(const chem::CountFingerprint &x, const chem::CountFingerprint &y,
                     double signal_variance = 1.0);

Eigen::MatrixXd gram_matrix(const std::vector<chem::CountFingerprint> &xs,
                            double signal_variance = 1.0);

struct GpOptions {
  double noise = 1e-4;  // in standardized target units
  double signal_variance = 1.0;
  double jitter_start = 1e-8;
  double jitter_max = 1e-2;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
  bool clamped = false;  // a negative variance was raised to 0
};

class GpModel {
public:
  // Exact regression on standardized targets. When the Gram plus noise is not
  // positive definite, jitter starting at jitter_start is doubled up to
  // jitter_max; past that, Error{kNumeric}.
  static GpModel fit(std::vector<chem::CountFingerprint> xs, const std::vector<double> &ys,
                     const GpOptions &opts = {});

  Posterior posterior(const chem::CountFingerprint &x) const;

  std::size_t size() const { return xs_.size(); }
  double target_mean() const { return y_mean_; }
  double target_scale() const { return y_scale_; }
  double jitter() const { return jitter_; }
  const GpOptions &options() const { return opts_; }

private:
  GpOptions opts_;
  std::vector<chem::CountFingerprint> xs_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double jitter_ = 0.0;
  Eigen::MatrixXd chol_;  // lower factor of K + (noise + jitter) I
  Eigen::VectorXd weights_;
};

// mean + sqrt(beta) * stddev
double ucb(const Posterior &p, double beta);
double ucb(const GpModel &model, const chem::CountFingerprint &x, double beta);

// ---- SynGBO ----------------------------------------------------------------

struct GboConfig {
  int proposals = 10;  // m
  std::int64_t budget = 10000;
  double beta_min = 0.01;
  double beta_max = 1.0;
  std::int64_t exploit_after = 5000;  // beta = 0 from this many samples on

  int nam_refit_period = 25;
  std::int64_t nam_min_samples = 500;
  int nam_top_k = 1000;
  double filter_epsilon = 0.1;
  int nam_fingerprint_dim = chem::kModelFingerprintDim;
  nn::NamTrainConfig nam;

  int gp_top = 2500;     // the GP is fit to these plus gp_random others
  int gp_random = 2500;  // once |H| > gp_top + gp_random
  GpOptions gp;

  // Inner SynGA on the acquisition: population cap, random routes added to
  // the top `inner_seeds` evaluated routes, then generations of offspring.
  int inner_population = 1000;
  int inner_seeds = 1000;
  int inner_random = 500;
  int inner_offspring = 100;
  int inner_generations = 5;
  double crossover_rate = 0.8;
  double mutation_rate = 0.5;
  int retries = 10;
  TreeLimits limits;

  std::uint64_t seed = 0;
  int workers = 1;

  // Scaled-down settings for 200-block catalogs and budgets near 2000.
  static GboConfig desk();
  void validate() const;
  nlohmann::json to_json() const;
  // Overrides fields present in `j`; unknown keys throw kInvalidArgument.
  static GboConfig from_json(const nlohmann::json &j, GboConfig base);
  static GboConfig from_json(const nlohmann::json &j) { return from_json(j, GboConfig()); }
};

struct GboIteration {
  int iteration = 0;
  double beta = 0.0;
  int filter_size = 0;  // 0 = unfiltered
  bool nam_refit = false;
  int gp_size = 0;
  double gp_jitter = 0.0;
  double best_acquisition = 0.0;
  int inner_candidates = 0;  // inner products not yet in the history
  int refilled = 0;          // random routes used when there were none
  std::vector<double> evaluated;
};

struct GboResult {
  RunHistory history;
  std::vector<GboIteration> iterations;
  bool stalled = false;
};

struct GboHooks {
  std::function<void(const GboIteration &)> on_iteration;
};

// History indices fit by the GP: everything when small, otherwise the top
// `top` by fitness plus `random` drawn uniformly from the rest.
std::vector<int> gp_subset(const RunHistory &history, int top, int random, Rng &rng);

GboResult run_syngbo(const GboConfig &cfg, const Fitness &fitness, const Catalog &catalog,
                     const GboHooks &hooks = {});

}  // namespace synroute

#endif  // SYNROUTE_SURROGATE_H_
