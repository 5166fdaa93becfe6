//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/surrogate.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "synroute/blockfilter.h"
#include "synroute/error.h"

namespace synroute {

double minmax_kernel(const chem::CountFingerprint &x, const chem::CountFingerprint &y,
                     double signal_variance) {
  const auto [lo, hi] = chem::min_max_sums(x, y);
  if (hi == 0) return 0.0;
  return signal_variance * static_cast<double>(lo) / static_cast<double>(hi);
}

Eigen::MatrixXd gram_matrix(const std::vector<chem::CountFingerprint> &xs,
                            double signal_variance) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = minmax_kernel(xs[i], xs[i], signal_variance);
    for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = minmax_kernel(xs[i], xs[j], signal_variance);
  }
  return k;
}

GpModel GpModel::fit(std::vector<chem::CountFingerprint> xs, const std::vector<double> &ys,
                     const GpOptions &opts) {
  if (xs.empty() || xs.size() != ys.size())
    throw Error(ErrorCode::kInvalidArgument, "GP needs equal, nonempty inputs and targets");
  if (!(opts.noise >= 0) || !(opts.signal_variance > 0))
    throw Error(ErrorCode::kInvalidArgument, "GP noise must be >= 0 and signal variance > 0");
  GpModel m;
  m.opts_ = opts;
  const auto n = static_cast<Eigen::Index>(ys.size());

  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double y : ys) var += (y - mean) * (y - mean);
  var /= static_cast<double>(n);
  m.y_mean_ = mean;
  m.y_scale_ = var > 0 ? std::sqrt(var) : 1.0;
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = (ys[i] - mean) / m.y_scale_;

  const Eigen::MatrixXd gram = gram_matrix(xs, opts.signal_variance);
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += opts.noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const Eigen::MatrixXd l = llt.matrixL();
      ok = (l.diagonal().array() > 0).all() && l.allFinite();
      if (ok) {
        m.chol_ = l;
        m.jitter_ = jitter;
        break;
      }
    }
    jitter = jitter == 0.0 ? opts.jitter_start : jitter * 2;
    if (jitter > opts.jitter_max) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
      std::ostringstream msg;
      msg << "GP Gram factorization failed for " << n << " points (noise " << opts.noise
          << ", max jitter " << opts.jitter_max << ", eigenvalues in ["
          << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "])";
      throw Error(ErrorCode::kNumeric, msg.str());
    }
  }
  m.weights_ = m.chol_.triangularView<Eigen::Lower>().solve(z);
  m.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(m.weights_);
  m.xs_ = std::move(xs);
  return m;
}

Posterior GpModel::posterior(const chem::CountFingerprint &x) const {
  const auto n = static_cast<Eigen::Index>(xs_.size());
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = minmax_kernel(x, xs_[i], opts_.signal_variance);
  Posterior p;
  p.mean = y_mean_ + y_scale_ * k.dot(weights_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  double var = minmax_kernel(x, x, opts_.signal_variance) - v.squaredNorm();
  if (var < 0) {
    var = 0;
    p.clamped = true;
  }
  p.variance = y_scale_ * y_scale_ * var;
  return p;
}

double ucb(const Posterior &p, double beta) {
  if (!(beta >= 0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (beta == 0) return p.mean;
  return p.mean + std::sqrt(beta) * std::sqrt(p.variance);
}

double ucb(const GpModel &model, const chem::CountFingerprint &x, double beta) {
  return ucb(model.posterior(x), beta);
}

// ---- configuration -----------------------------------------------------------

GboConfig GboConfig::desk() {
  GboConfig c;
  c.budget = 2000;
  c.exploit_after = 1000;
  c.nam_top_k = 50;
  c.nam_fingerprint_dim = 512;
  c.gp_top = 250;
  c.gp_random = 250;
  c.inner_population = 200;
  c.inner_seeds = 200;
  c.inner_random = 100;
  c.inner_offspring = 20;
  return c;
}

void GboConfig::validate() const {
  auto bad = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, "invalid SynGBO config: " + what);
  };
  if (proposals < 1) bad("proposals must be >= 1");
  if (budget < proposals) bad("budget must be >= proposals");
  if (!(beta_min > 0) || !(beta_max >= beta_min)) bad("need 0 < beta_min <= beta_max");
  if (exploit_after < 0) bad("exploit_after must be >= 0");
  if (nam_refit_period < 1 || nam_top_k < 1 || nam_fingerprint_dim < 8) bad("NAM settings");
  if (!(filter_epsilon >= 0 && filter_epsilon <= 1)) bad("filter_epsilon must be in [0, 1]");
  if (gp_top < 1 || gp_random < 0) bad("GP subset sizes");
  if (inner_population < 1 || inner_seeds < 0 || inner_random < 1 || inner_offspring < 1
      || inner_generations < 1)
    bad("inner SynGA sizes must be positive");
  if (!(crossover_rate >= 0 && crossover_rate <= 1) || !(mutation_rate >= 0 && mutation_rate <= 1))
    bad("rates must be in [0, 1]");
  if (retries < 1 || workers < 1) bad("retries and workers must be >= 1");
}

nlohmann::json GboConfig::to_json() const {
  return {{"proposals", proposals},
          {"budget", budget},
          {"beta_min", beta_min},
          {"beta_max", beta_max},
          {"exploit_after", exploit_after},
          {"nam_refit_period", nam_refit_period},
          {"nam_min_samples", nam_min_samples},
          {"nam_top_k", nam_top_k},
          {"filter_epsilon", filter_epsilon},
          {"nam_fingerprint_dim", nam_fingerprint_dim},
          {"gp_top", gp_top},
          {"gp_random", gp_random},
          {"gp_noise", gp.noise},
          {"inner_population", inner_population},
          {"inner_seeds", inner_seeds},
          {"inner_random", inner_random},
          {"inner_offspring", inner_offspring},
          {"inner_generations", inner_generations},
          {"crossover_rate", crossover_rate},
          {"mutation_rate", mutation_rate},
          {"retries", retries},
          {"max_steps", limits.max_internal},
          {"max_weight", limits.max_weight},
          {"seed", seed},
          {"workers", workers}};
}

GboConfig GboConfig::from_json(const nlohmann::json &j, GboConfig c) {
  for (const auto &[key, value] : j.items()) {
    if (key == "proposals") c.proposals = value.get<int>();
    else if (key == "budget") c.budget = value.get<std::int64_t>();
    else if (key == "beta_min") c.beta_min = value.get<double>();
    else if (key == "beta_max") c.beta_max = value.get<double>();
    else if (key == "exploit_after") c.exploit_after = value.get<std::int64_t>();
    else if (key == "nam_refit_period") c.nam_refit_period = value.get<int>();
    else if (key == "nam_min_samples") c.nam_min_samples = value.get<std::int64_t>();
    else if (key == "nam_top_k") c.nam_top_k = value.get<int>();
    else if (key == "filter_epsilon") c.filter_epsilon = value.get<double>();
    else if (key == "nam_fingerprint_dim") c.nam_fingerprint_dim = value.get<int>();
    else if (key == "gp_top") c.gp_top = value.get<int>();
    else if (key == "gp_random") c.gp_random = value.get<int>();
    else if (key == "gp_noise") c.gp.noise = value.get<double>();
    else if (key == "inner_population") c.inner_population = value.get<int>();
    else if (key == "inner_seeds") c.inner_seeds = value.get<int>();
    else if (key == "inner_random") c.inner_random = value.get<int>();
    else if (key == "inner_offspring") c.inner_offspring = value.get<int>();
    else if (key == "inner_generations") c.inner_generations = value.get<int>();
    else if (key == "crossover_rate") c.crossover_rate = value.get<double>();
    else if (key == "mutation_rate") c.mutation_rate = value.get<double>();
    else if (key == "retries") c.retries = value.get<int>();
    else if (key == "max_steps") c.limits.max_internal = value.get<int>();
    else if (key == "max_weight") c.limits.max_weight = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "workers") c.workers = value.get<int>();
    else throw Error(ErrorCode::kInvalidArgument, "unknown SynGBO option '" + key + "'");
  }
  c.validate();
  return c;
}

// ---- outer loop --------------------------------------------------------------

std::vector<int> gp_subset(const RunHistory &history, int top, int random, Rng &rng) {
  const auto n = static_cast<int>(history.size());
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  if (n <= top + random) return all;
  const auto ranked = history.ranked();
  const HistoryEntry *base = history.entries().data();
  std::vector<int> chosen, rest;
  for (int r = 0; r < n; ++r)
    (r < top ? chosen : rest).push_back(static_cast<int>(ranked[r] - base));
  for (int i = 0; i < random; ++i) {
    const auto j = i + uniform_index(rng, rest.size() - static_cast<std::size_t>(i));
    std::swap(rest[i], rest[j]);
    chosen.push_back(rest[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

constexpr std::uint64_t kGboInitStream = 0x3003;
constexpr std::uint64_t kGboRefillStream = 0x3113;
constexpr std::uint64_t kGboSubsetStream = 0x3223;
constexpr std::uint64_t kGboBetaStream = 0x3333;
constexpr std::uint64_t kGboInnerStream = 0x3443;
constexpr std::uint64_t kGboNamStream = 0x3553;

chem::CountFingerprint gp_features(const SynthesisTree &tree) {
  return chem::morgan_count_fp(tree.product(), chem::kMorganRadius, chem::kModelFingerprintDim);
}

}  // namespace

GboResult run_syngbo(const GboConfig &cfg, const Fitness &fitness, const Catalog &catalog,
                     const GboHooks &hooks) {
  cfg.validate();
  if (catalog.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "empty building-block catalog");

  GboResult result;
  result.history = RunHistory(cfg.budget);
  RunHistory &history = result.history;
  std::vector<chem::CountFingerprint> features;

  auto evaluate = [&](const std::vector<SynthesisTree> &trees) {
    const auto values = evaluate_all(fitness, trees, cfg.workers);
    for (std::size_t i = 0; i < trees.size(); ++i) {
      history.add(trees[i].key(), values[i], trees[i]);
      features.push_back(gp_features(trees[i]));
    }
    return values;
  };

  // Up to `want` unseen random routes, distinct from each other.
  auto random_routes = [&](int want, std::uint64_t stream, const BlockFilter *filter) {
    OpContext ctx {catalog, filter, cfg.limits, cfg.retries};
    std::vector<SynthesisTree> out;
    std::unordered_set<std::string> batch;
    const std::int64_t max_attempts = static_cast<std::int64_t>(want) * 20 + 100;
    for (std::int64_t a = 0; a < max_attempts && static_cast<int>(out.size()) < want; ++a) {
      Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(a)));
      SynthesisTree t = sample_route(ctx, rng, cfg.limits.max_internal);
      if (history.contains(t.key()) || !batch.insert(t.key().text).second) continue;
      out.push_back(std::move(t));
    }
    return out;
  };

  const auto first = random_routes(cfg.proposals, kGboInitStream, nullptr);
  if (first.empty()) throw Error(ErrorCode::kInvalidArgument, "could not sample any route");
  evaluate(first);

  std::optional<BlockFilter> filter;
  Eigen::MatrixXd block_fps;
  for (int it = 0; !history.exhausted(); ++it) {
    GboIteration log;
    log.iteration = it;

    if (history.size() >= cfg.nam_min_samples && it % cfg.nam_refit_period == 0) {
      if (block_fps.size() == 0) block_fps = block_fingerprint_matrix(catalog, cfg.nam_fingerprint_dim);
      std::vector<nn::NamExample> examples;
      for (const auto &e : history.entries()) examples.push_back({e.tree.leaves(), e.fitness});
      nn::NamTrainConfig nam_cfg = cfg.nam;
      nam_cfg.seed = derive_seed(cfg.seed, kGboNamStream, static_cast<std::uint64_t>(it));
      const auto trained = nn::train_nam(examples, block_fps, nam_cfg);
      if (!trained.skipped) {
        filter = BlockFilter::from_ids(nam_top_k_filter(trained.model, block_fps, cfg.nam_top_k),
                                       cfg.filter_epsilon, FilterKind::kNam);
        log.nam_refit = true;
      }
    }
    log.filter_size = filter ? static_cast<int>(filter->ids.size()) : 0;

    Rng subset_rng(derive_seed(cfg.seed, kGboSubsetStream, static_cast<std::uint64_t>(it)));
    const auto subset = gp_subset(history, cfg.gp_top, cfg.gp_random, subset_rng);
    std::vector<chem::CountFingerprint> xs;
    std::vector<double> ys;
    for (int i : subset) {
      xs.push_back(features[static_cast<std::size_t>(i)]);
      ys.push_back(history.entries()[static_cast<std::size_t>(i)].fitness);
    }
    const GpModel gp = GpModel::fit(std::move(xs), ys, cfg.gp);
    log.gp_size = static_cast<int>(gp.size());
    log.gp_jitter = gp.jitter();

    double beta = 0.0;
    if (history.size() < cfg.exploit_after) {
      Rng beta_rng(derive_seed(cfg.seed, kGboBetaStream, static_cast<std::uint64_t>(it)));
      const double lo = std::log(cfg.beta_min), hi = std::log(cfg.beta_max);
      beta = std::exp(lo + (hi - lo) * uniform_real(beta_rng));
    }
    log.beta = beta;

    GaConfig inner;
    inner.population_size = cfg.inner_population;
    inner.initial_size = cfg.inner_random;
    inner.offspring_size = cfg.inner_offspring;
    inner.crossover_rate = cfg.crossover_rate;
    inner.mutation_rate = cfg.mutation_rate;
    inner.budget = 0;
    inner.max_generations = cfg.inner_generations;
    inner.retries = cfg.retries;
    inner.limits = cfg.limits;
    inner.workers = cfg.workers;
    inner.seed = derive_seed(cfg.seed, kGboInnerStream, static_cast<std::uint64_t>(it));

    GaHooks inner_hooks;
    const auto ranked = history.ranked();
    for (std::size_t r = 0; r < ranked.size() && static_cast<int>(r) < cfg.inner_seeds; ++r)
      inner_hooks.seeds.push_back(ranked[r]->tree);

    const Fitness acquisition = [&gp, beta](const SynthesisTree &t) {
      return ucb(gp, gp_features(t), beta);
    };
    const GaResult inner_run =
        run_synga(inner, acquisition, catalog, filter ? &*filter : nullptr, inner_hooks);

    const auto room = std::min<std::int64_t>(cfg.proposals, history.budget() - history.size());
    std::vector<SynthesisTree> picks;
    bool first_candidate = true;
    for (const HistoryEntry *e : inner_run.history.ranked()) {
      if (history.contains(e->key)) continue;
      ++log.inner_candidates;
      if (first_candidate) log.best_acquisition = e->fitness;
      first_candidate = false;
      if (static_cast<std::int64_t>(picks.size()) < room) picks.push_back(e->tree);
    }
    if (picks.empty()) {
      picks = random_routes(static_cast<int>(room),
                            kGboRefillStream ^ static_cast<std::uint64_t>(it) << 16, nullptr);
      log.refilled = static_cast<int>(picks.size());
      if (picks.empty()) {
        result.stalled = true;
        break;
      }
    }
    log.evaluated = evaluate(picks);
    if (hooks.on_iteration) hooks.on_iteration(log);
    result.iterations.push_back(std::move(log));
  }
  return result;
}

}  // namespace synroute
