//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_ORACLES_H_
#define SYNROUTE_ORACLES_H_

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "synroute/catalog.h"
#include "synroute/chem/fingerprint.h"
#include "synroute/genetic.h"

namespace synroute {

// Opaque scoring function with a call counter and optional product cache.
// The counter counts cache misses only.
class Oracle {
public:
  using RouteFn = std::function<double(const SynthesisTree &)>;
  using MoleculeFn = std::function<double(const chem::Molecule &)>;

  Oracle(std::string name, RouteFn fn, bool cache = true);
  // Molecule-level oracle; also usable on bare molecules.
  static std::shared_ptr<Oracle> from_molecule(std::string name, MoleculeFn fn,
                                               bool cache = true);

  const std::string &name() const { return name_; }
  double operator()(const SynthesisTree &tree);
  // Throws kInvalidArgument for route-only oracles.
  double score_molecule(const chem::Molecule &mol, const chem::CanonicalKey &key);
  std::int64_t calls() const { return calls_.load(); }
  Fitness as_fitness();

private:
  std::optional<double> cached(const std::string &key);
  double store(const std::string &key, double v);

  std::string name_;
  RouteFn route_fn_;
  MoleculeFn mol_fn_;
  bool use_cache_;
  std::mutex mutex_;
  std::unordered_map<std::string, double> cache_;
  std::atomic<std::int64_t> calls_ {0};
};

using OraclePtr = std::shared_ptr<Oracle>;

// 0.9 * Tanimoto(fp4096) + 0.1 * scaffold Tanimoto; the scaffold term is 1
// when both scaffolds are empty and 0 when exactly one is.
double analog_score(const chem::Molecule &mol, const chem::Molecule &query);

class AnalogScorer {
public:
  explicit AnalogScorer(const chem::Molecule &query);
  double operator()(const chem::Molecule &mol) const;

private:
  chem::CountFingerprint fp_;
  chem::CountFingerprint scaffold_fp_;
  bool scaffold_empty_;
};

// 1 - L1(counts - target) / L1(target), clamped to [0, 1]; hydrogens count.
double formula_score(const chem::Molecule &mol, const std::map<std::string, int> &target);

OraclePtr make_analog_oracle(const chem::Molecule &query);
OraclePtr make_formula_oracle(const std::map<std::string, int> &target);
OraclePtr make_similarity_oracle(const chem::Molecule &target);

// Mean of per-block scalars over a route's leaves (multiset); the scalars are
// drawn Uniform(0, 1) from the seed.
class AdditiveBlockOracle {
public:
  AdditiveBlockOracle(int n_blocks, std::uint64_t seed);
  const std::vector<double> &weights() const { return weights_; }
  double operator()(const SynthesisTree &tree) const;
  OraclePtr make_oracle() const;

private:
  std::vector<double> weights_;
};

// Builds an oracle from a JSON spec such as {"type": "analog", "query": "CCO"},
// {"type": "formula", "formula": "C7H8"}, {"type": "similarity", "target": ...}
// or {"type": "additive", "seed": 3}.
OraclePtr make_oracle(const nlohmann::json &spec, const Catalog &catalog);

// ---- metrics ---------------------------------------------------------------

// Mean of the top min(k, t) of the first t values.
double running_top_k_mean(const std::vector<double> &values, std::size_t t, int k);

// Trapezoid estimate of (1/B) sum_t topk_mean(t) with nodes every `interval`
// calls (plus B); the curve is held at its first node value on [0, interval].
// Calls past the end of `values` repeat the final curve value.
double top_k_auc(const std::vector<double> &values, int k = 10, int interval = 100,
                 std::int64_t budget = 0);

struct Clustering {
  std::vector<int> assignment;       // cluster index per input
  std::vector<int> representatives;  // founder index per cluster
};

// Scan in order: join the first cluster whose founder has Tanimoto >= cutoff,
// else found a new cluster.
Clustering greedy_cluster(const std::vector<chem::CountFingerprint> &fps, double cutoff);

// Mean pairwise (1 - Tanimoto).
double mean_diversity(const std::vector<chem::CountFingerprint> &fps);

}  // namespace synroute

#endif  // SYNROUTE_ORACLES_H_
