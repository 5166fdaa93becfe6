//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_GENETIC_H_
#define SYNROUTE_GENETIC_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "synroute/synthesis.h"

namespace synroute {

enum class MutationOp { kGrow = 0, kShrink, kRerun, kChangeInternal, kChangeLeaf };
inline constexpr int kNumMutationOps = 5;
const char *mutation_op_name(MutationOp op);

struct GaConfig {
  int initial_size = 0;  // n0; 0 means population_size
  int population_size = 500;
  int offspring_size = 5;
  double crossover_rate = 0.8;
  double mutation_rate = 0.5;
  std::int64_t budget = 10000;  // 0 = unlimited (generation-bounded runs)
  std::array<double, kNumMutationOps> mutation_weights {1, 1, 2, 2, 2};
  int retries = 10;
  std::uint64_t seed = 0;
  int max_generations = 0;     // 0 = until the budget is spent
  int stall_generations = 1000;  // stop after this many generations with no new product
  int workers = 1;
  TreeLimits limits;

  // Throws Error{kInvalidArgument} on out-of-range fields.
  void validate() const;
  int effective_initial_size() const {
    return initial_size > 0 ? initial_size : population_size;
  }

  nlohmann::json to_json() const;
  // Overrides fields present in `j`; unknown keys throw kInvalidArgument.
  static GaConfig from_json(const nlohmann::json &j, GaConfig base);
  static GaConfig from_json(const nlohmann::json &j) { return from_json(j, GaConfig()); }
};

struct RouteRecord {
  SynthesisTree tree;
  double fitness = 0.0;
  std::int64_t discovered = 0;  // oracle-call index
};

struct HistoryEntry {
  chem::CanonicalKey key;
  double fitness = 0.0;
  std::int64_t call = 0;  // 1-based oracle-call index
  SynthesisTree tree;
};

// Insertion-ordered unique product -> fitness map.
class RunHistory {
public:
  explicit RunHistory(std::int64_t budget = 0): budget_(budget) { }

  bool contains(const chem::CanonicalKey &key) const { return index_.count(key.text) != 0; }
  const HistoryEntry *find(const chem::CanonicalKey &key) const;
  // Throws when the key exists or the budget is exhausted.
  const HistoryEntry &add(const chem::CanonicalKey &key, double fitness,
                          SynthesisTree tree);

  std::int64_t size() const { return static_cast<std::int64_t>(entries_.size()); }
  std::int64_t budget() const { return budget_; }
  bool exhausted() const { return budget_ > 0 && size() >= budget_; }
  const std::vector<HistoryEntry> &entries() const { return entries_; }

  // Entries sorted by fitness (descending), ties by call index.
  std::vector<const HistoryEntry *> ranked() const;

private:
  std::int64_t budget_;
  std::vector<HistoryEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

using Fitness = std::function<double(const SynthesisTree &)>;

// Fitness values in input order, computed on up to `workers` threads. Errors
// are rethrown with the product key; non-finite values raise kNumeric.
std::vector<double> evaluate_all(const Fitness &fitness, const std::vector<SynthesisTree> &trees,
                                 int workers = 1);

// Joins a random eligible subtree pair under a new binary reaction.
std::optional<SynthesisTree> crossover(const SynthesisTree &a, const SynthesisTree &b,
                                       const OpContext &ctx, Rng &rng);

MutationOp sample_mutation(const std::array<double, kNumMutationOps> &weights, Rng &rng);

// One attempt of the given operator; nullopt when it does not apply or the
// product would not change.
std::optional<SynthesisTree> apply_mutation(MutationOp op, const SynthesisTree &tree,
                                            const OpContext &ctx, Rng &rng);

// Samples an operator by weight and retries it up to ctx.retries times.
std::optional<SynthesisTree> mutate(const SynthesisTree &tree, const OpContext &ctx,
                                    const std::array<double, kNumMutationOps> &weights,
                                    Rng &rng, MutationOp *chosen = nullptr);

// k distinct ranks (0-based) drawn sequentially with weight 1/(rank+1).
std::vector<int> inverse_rank_sample(int n, int k, Rng &rng);

struct GenerationStats {
  int generation = 0;
  std::int64_t evaluated = 0;
  double best = 0.0;
  double mean_top10 = 0.0;
  int offspring_added = 0;
};

struct GaResult {
  std::vector<RouteRecord> population;  // sorted best first
  RunHistory history;
  int generations = 0;
  bool stalled = false;
};

struct GaHooks {
  // Trees placed in the initial pool before the n0 random routes.
  std::vector<SynthesisTree> seeds;
  // Called after each generation's commit.
  std::function<void(const GenerationStats &)> on_generation;
};

// The SynGA loop: n0 random routes, then generations of offspring built by
// inverse-rank parent selection, crossover and mutation, with elitist
// truncation, until the evaluation budget is spent.
GaResult run_synga(const GaConfig &cfg, const Fitness &fitness, const Catalog &catalog,
                   const BlockFilter *filter = nullptr, const GaHooks &hooks = {});

}  // namespace synroute

#endif  // SYNROUTE_GENETIC_H_
