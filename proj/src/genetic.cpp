//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/genetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "synroute/error.h"

namespace synroute {

const char *mutation_op_name(MutationOp op) {
  switch (op) {
  case MutationOp::kGrow:
    return "grow";
  case MutationOp::kShrink:
    return "shrink";
  case MutationOp::kRerun:
    return "rerun";
  case MutationOp::kChangeInternal:
    return "change_internal";
  case MutationOp::kChangeLeaf:
    return "change_leaf";
  }
  return "?";
}

void GaConfig::validate() const {
  auto bad = [](const std::string &m) { throw Error(ErrorCode::kInvalidArgument, m); };
  if (population_size < 1) bad("population_size must be >= 1");
  if (offspring_size < 1) bad("offspring_size must be >= 1");
  if (initial_size < 0) bad("initial_size must be >= 0");
  if (!(crossover_rate >= 0 && crossover_rate <= 1)) bad("crossover_rate must lie in [0, 1]");
  if (!(mutation_rate >= 0 && mutation_rate <= 1)) bad("mutation_rate must lie in [0, 1]");
  double total = 0;
  for (double w : mutation_weights) {
    if (!(w >= 0) || !std::isfinite(w)) bad("mutation weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0)) bad("mutation weights must have a positive sum");
  if (retries < 1) bad("retries must be >= 1");
  if (budget < 0) bad("budget must be >= 0");
  if (budget > 0 && budget < effective_initial_size())
    bad("budget must be at least the initial population size");
  if (budget == 0 && max_generations <= 0)
    bad("an unlimited budget needs max_generations");
  if (workers < 1) bad("workers must be >= 1");
  if (stall_generations < 1) bad("stall_generations must be >= 1");
  if (limits.max_internal < 1) bad("max steps must be >= 1");
}

nlohmann::json GaConfig::to_json() const {
  return {{"initial_size", initial_size},
          {"population_size", population_size},
          {"offspring_size", offspring_size},
          {"crossover_rate", crossover_rate},
          {"mutation_rate", mutation_rate},
          {"budget", budget},
          {"mutation_weights", mutation_weights},
          {"retries", retries},
          {"max_generations", max_generations},
          {"stall_generations", stall_generations},
          {"max_steps", limits.max_internal},
          {"max_weight", limits.max_weight},
          {"seed", seed},
          {"workers", workers}};
}

GaConfig GaConfig::from_json(const nlohmann::json &j, GaConfig c) {
  for (const auto &[key, value] : j.items()) {
    if (key == "initial_size") c.initial_size = value.get<int>();
    else if (key == "population_size") c.population_size = value.get<int>();
    else if (key == "offspring_size") c.offspring_size = value.get<int>();
    else if (key == "crossover_rate") c.crossover_rate = value.get<double>();
    else if (key == "mutation_rate") c.mutation_rate = value.get<double>();
    else if (key == "budget") c.budget = value.get<std::int64_t>();
    else if (key == "mutation_weights") c.mutation_weights = value.get<std::array<double, kNumMutationOps>>();
    else if (key == "retries") c.retries = value.get<int>();
    else if (key == "max_generations") c.max_generations = value.get<int>();
    else if (key == "stall_generations") c.stall_generations = value.get<int>();
    else if (key == "max_steps") c.limits.max_internal = value.get<int>();
    else if (key == "max_weight") c.limits.max_weight = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "workers") c.workers = value.get<int>();
    else throw Error(ErrorCode::kInvalidArgument, "unknown SynGA option '" + key + "'");
  }
  c.validate();
  return c;
}

const HistoryEntry *RunHistory::find(const chem::CanonicalKey &key) const {
  auto it = index_.find(key.text);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const HistoryEntry &RunHistory::add(const chem::CanonicalKey &key, double fitness,
                                    SynthesisTree tree) {
  if (contains(key)) throw Error(ErrorCode::kExists, "product already evaluated: " + key.text);
  if (exhausted()) throw Error(ErrorCode::kInvalidArgument, "evaluation budget exhausted");
  index_.emplace(key.text, entries_.size());
  entries_.push_back({key, fitness, size() + 1, std::move(tree)});
  return entries_.back();
}

std::vector<const HistoryEntry *> RunHistory::ranked() const {
  std::vector<const HistoryEntry *> out;
  out.reserve(entries_.size());
  for (const auto &e : entries_) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(), [](const HistoryEntry *a, const HistoryEntry *b) {
    return a->fitness > b->fitness;
  });
  return out;
}

// ---- crossover ------------------------------------------------------------

std::optional<SynthesisTree> crossover(const SynthesisTree &a, const SynthesisTree &b,
                                       const OpContext &ctx, Rng &rng) {
  const auto sa = enumerate_subtrees(a);
  const auto sb = enumerate_subtrees(b);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < sa.size(); ++i)
    for (std::size_t j = 0; j < sb.size(); ++j)
      if (sa[i].num_internal() + sb[j].num_internal() + 1 <= ctx.limits.max_internal)
        pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
  shuffle(rng, pairs);

  // Uniform over eligible pairs: scan a random permutation, stop at the first.
  for (const auto &[i, j] : pairs) {
    const NodePtr &x = sa[i].root();
    const NodePtr &y = sb[j].root();
    auto slots_x = ctx.catalog.compatible_templates(*x->mol, x->key);
    auto slots_y = ctx.catalog.compatible_templates(*y->mol, y->key);
    std::vector<int> templates;
    for (const auto &sx : slots_x) {
      if (ctx.catalog.reaction(sx.template_index).arity() != 2) continue;
      for (const auto &sy : slots_y)
        if (sy.template_index == sx.template_index && sy.slot != sx.slot)
          templates.push_back(sx.template_index);
    }
    std::sort(templates.begin(), templates.end());
    templates.erase(std::unique(templates.begin(), templates.end()), templates.end());

    std::vector<std::pair<int, chem::Product>> options;
    for (int t : templates)
      for (auto &p : detail::capped_products(ctx, t, {x, y})) options.push_back({t, p});
    if (options.empty()) continue;
    const auto &[t, p] = options[uniform_index(rng, options.size())];
    return SynthesisTree(make_internal(t, p, {x, y}));
  }
  return std::nullopt;
}

// ---- mutation -------------------------------------------------------------

MutationOp sample_mutation(const std::array<double, kNumMutationOps> &weights, Rng &rng) {
  return static_cast<MutationOp>(
      weighted_index(rng, std::vector<double>(weights.begin(), weights.end())));
}

namespace {

struct Located {
  NodePtr node;
  std::vector<int> path;  // child indices from the root
};

void locate_all(const NodePtr &n, std::vector<int> &path, std::vector<Located> &out) {
  out.push_back({n, path});
  for (std::size_t c = 0; c < n->children.size(); ++c) {
    path.push_back(static_cast<int>(c));
    locate_all(n->children[c], path, out);
    path.pop_back();
  }
}

std::vector<Located> locate_all(const SynthesisTree &tree) {
  std::vector<Located> out;
  std::vector<int> path;
  locate_all(tree.root(), path, out);
  return out;
}

// Copy of `n` with different children; products are left as they are since
// the structure is only used as input to reassignment.
NodePtr with_children(const NodePtr &n, int reaction, std::vector<NodePtr> children) {
  auto copy = std::make_shared<TreeNode>(*n);
  copy->reaction = reaction;
  copy->block = -1;
  copy->internal_count = 1;
  copy->node_count = 1;
  for (const auto &c : children) {
    copy->internal_count += c->internal_count;
    copy->node_count += c->node_count;
  }
  copy->children = std::move(children);
  return copy;
}

NodePtr replace_at(const NodePtr &n, const std::vector<int> &path, std::size_t depth,
                   const NodePtr &replacement) {
  if (depth == path.size()) return replacement;
  std::vector<NodePtr> children = n->children;
  children[path[depth]] = replace_at(children[path[depth]], path, depth + 1, replacement);
  return with_children(n, n->reaction, std::move(children));
}

std::optional<SynthesisTree> do_grow(const SynthesisTree &tree, const OpContext &ctx,
                                     Rng &rng) {
  return grow(tree, ctx, rng);
}

std::optional<SynthesisTree> do_shrink(const SynthesisTree &tree, Rng &rng) {
  const NodePtr &root = tree.root();
  if (root->is_leaf()) return std::nullopt;
  return SynthesisTree(root->children[uniform_index(rng, root->children.size())]);
}

std::optional<SynthesisTree> do_rerun(const SynthesisTree &tree, const OpContext &ctx,
                                      Rng &rng) {
  if (tree.root()->is_leaf()) return std::nullopt;
  return detail::reassign(tree, ctx, rng, &tree.key());
}

std::optional<SynthesisTree> do_change_internal(const SynthesisTree &tree,
                                                const OpContext &ctx, Rng &rng) {
  std::vector<Located> internals;
  for (auto &l : locate_all(tree))
    if (!l.node->is_leaf()) internals.push_back(std::move(l));
  if (internals.empty()) return std::nullopt;
  const Located &v = internals[uniform_index(rng, internals.size())];
  const auto &children = v.node->children;

  std::vector<int> candidates;
  for (int t = 0; t < ctx.catalog.num_templates(); ++t) {
    if (t == v.node->reaction) continue;
    if (ctx.catalog.reaction(t).arity() != static_cast<int>(children.size())) continue;
    if (!detail::capped_products(ctx, t, children).empty()) candidates.push_back(t);
  }
  if (candidates.empty()) return std::nullopt;
  const int t = candidates[uniform_index(rng, candidates.size())];
  NodePtr changed = with_children(v.node, t, children);
  SynthesisTree structure(replace_at(tree.root(), v.path, 0, changed));
  return detail::reassign(structure, ctx, rng, &tree.key());
}

std::optional<SynthesisTree> do_change_leaf(const SynthesisTree &tree, const OpContext &ctx,
                                            Rng &rng) {
  std::vector<Located> all = locate_all(tree);
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].node->is_leaf()) leaves.push_back(i);
  const Located &leaf = all[leaves[uniform_index(rng, leaves.size())]];
  const int old_block = leaf.node->block;

  if (leaf.path.empty()) {
    std::vector<int> space;
    for (int id = 0; id < ctx.catalog.size(); ++id)
      if (id != old_block) space.push_back(id);
    auto draw = sample_filtered(space, ctx.filter, rng);
    if (!draw) return std::nullopt;
    return SynthesisTree(make_leaf(ctx.catalog, draw->id));
  }

  // Parent and sibling of the chosen leaf.
  NodePtr parent = tree.root();
  for (std::size_t d = 0; d + 1 < leaf.path.size(); ++d)
    parent = parent->children[leaf.path[d]];
  const int t = parent->reaction;
  const int position = leaf.path.back();

  std::vector<int> space;
  for (int s = 0; s < ctx.catalog.reaction(t).arity(); ++s)
    for (int id : ctx.catalog.slot_blocks(t, s))
      if (id != old_block) space.push_back(id);
  std::sort(space.begin(), space.end());
  space.erase(std::unique(space.begin(), space.end()), space.end());

  auto accept = [&](int id) {
    std::vector<NodePtr> kids = parent->children;
    kids[position] = make_leaf(ctx.catalog, id);
    return !detail::capped_products(ctx, t, kids).empty();
  };
  auto draw = sample_filtered(space, ctx.filter, rng, accept);
  if (!draw) return std::nullopt;
  SynthesisTree structure(
      replace_at(tree.root(), leaf.path, 0, make_leaf(ctx.catalog, draw->id)));
  return detail::reassign(structure, ctx, rng, &tree.key());
}

}  // namespace

std::optional<SynthesisTree> apply_mutation(MutationOp op, const SynthesisTree &tree,
                                            const OpContext &ctx, Rng &rng) {
  std::optional<SynthesisTree> out;
  switch (op) {
  case MutationOp::kGrow:
    out = do_grow(tree, ctx, rng);
    break;
  case MutationOp::kShrink:
    out = do_shrink(tree, rng);
    break;
  case MutationOp::kRerun:
    out = do_rerun(tree, ctx, rng);
    break;
  case MutationOp::kChangeInternal:
    out = do_change_internal(tree, ctx, rng);
    break;
  case MutationOp::kChangeLeaf:
    out = do_change_leaf(tree, ctx, rng);
    break;
  }
  if (out && out->key() == tree.key()) return std::nullopt;
  return out;
}

std::optional<SynthesisTree> mutate(const SynthesisTree &tree, const OpContext &ctx,
                                    const std::array<double, kNumMutationOps> &weights,
                                    Rng &rng, MutationOp *chosen) {
  const MutationOp op = sample_mutation(weights, rng);
  if (chosen) *chosen = op;
  for (int attempt = 0; attempt < ctx.retries; ++attempt)
    if (auto out = apply_mutation(op, tree, ctx, rng)) return out;
  return std::nullopt;
}

// ---- parent selection -----------------------------------------------------

std::vector<int> inverse_rank_sample(int n, int k, Rng &rng) {
  if (k > n || k < 0)
    throw Error(ErrorCode::kInvalidArgument, "cannot draw " + std::to_string(k)
                                                 + " parents from " + std::to_string(n));
  std::vector<double> weights(n);
  for (int r = 0; r < n; ++r) weights[r] = 1.0 / (r + 1);
  std::vector<int> out;
  for (int draw = 0; draw < k; ++draw) {
    const std::size_t idx = weighted_index(rng, weights);
    out.push_back(static_cast<int>(idx));
    weights[idx] = 0.0;
  }
  return out;
}

// ---- main loop ------------------------------------------------------------

namespace {

constexpr std::uint64_t kInitStream = 0x1001;
constexpr std::uint64_t kOffspringStream = 0x2002;

void sort_population(std::vector<RouteRecord> &pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const RouteRecord &a, const RouteRecord &b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.discovered < b.discovered;
  });
}

double checked_fitness(const Fitness &fitness, const SynthesisTree &tree) {
  double v;
  try {
    v = fitness(tree);
  } catch (const Error &e) {
    throw Error(e.code(), "fitness failed for " + tree.key().text + ": " + e.what());
  } catch (const std::exception &e) {
    throw Error(ErrorCode::kInternal, "fitness failed for " + tree.key().text + ": " + e.what());
  }
  if (!std::isfinite(v))
    throw Error(ErrorCode::kNumeric, "fitness is not finite for " + tree.key().text);
  return v;
}

}  // namespace

std::vector<double> evaluate_all(const Fitness &fitness,
                                 const std::vector<SynthesisTree> &trees, int workers) {
  std::vector<double> out(trees.size());
  if (workers <= 1 || trees.size() < 2) {
    for (std::size_t i = 0; i < trees.size(); ++i) out[i] = checked_fitness(fitness, trees[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(trees.size());
  std::vector<std::thread> pool;
  const int w = std::min<int>(workers, static_cast<int>(trees.size()));
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < trees.size(); i += w) {
        try {
          out[i] = checked_fitness(fitness, trees[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool) th.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

template <class F>
void parallel_for(int count, int workers, F &&body) {
  if (workers <= 1 || count < 2) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  const int w = std::min(workers, count);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += w) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool) th.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

GaResult run_synga(const GaConfig &cfg, const Fitness &fitness, const Catalog &catalog,
                   const BlockFilter *filter, const GaHooks &hooks) {
  cfg.validate();
  if (catalog.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "empty building-block catalog");
  OpContext ctx {catalog, filter, cfg.limits, cfg.retries};

  GaResult result;
  result.history = RunHistory(cfg.budget);
  RunHistory &history = result.history;
  std::vector<RouteRecord> &pop = result.population;

  // Commits already-built candidates in order, skipping duplicates and
  // stopping at the budget. Returns the records added.
  auto commit = [&](const std::vector<std::optional<SynthesisTree>> &candidates) {
    std::vector<SynthesisTree> fresh;
    std::unordered_map<std::string, int> batch;
    for (const auto &c : candidates) {
      if (!c || history.contains(c->key()) || batch.count(c->key().text)) continue;
      if (cfg.budget > 0 && history.size() + static_cast<std::int64_t>(fresh.size())
                                >= cfg.budget)
        break;
      batch.emplace(c->key().text, 0);
      fresh.push_back(*c);
    }
    const auto values = evaluate_all(fitness, fresh, cfg.workers);
    std::vector<RouteRecord> added;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      const auto &e = history.add(fresh[i].key(), values[i], fresh[i]);
      added.push_back({fresh[i], values[i], e.call});
    }
    return added;
  };

  // Initial population: seeds first, then n0 random routes.
  {
    std::vector<std::optional<SynthesisTree>> seeds(hooks.seeds.begin(), hooks.seeds.end());
    for (auto &r : commit(seeds)) pop.push_back(std::move(r));

    const int n0 = cfg.effective_initial_size();
    const std::int64_t max_attempts = static_cast<std::int64_t>(n0) * 20 + 100;
    int added = 0;
    std::int64_t attempt = 0;
    while (added < n0 && attempt < max_attempts && !history.exhausted()) {
      const int batch_size = std::min<int>(n0 - added, 64);
      std::vector<std::optional<SynthesisTree>> batch(batch_size);
      const std::int64_t base = attempt;
      parallel_for(batch_size, cfg.workers, [&](int i) {
        Rng rng(derive_seed(cfg.seed, kInitStream, static_cast<std::uint64_t>(base + i)));
        batch[i] = sample_route(ctx, rng, cfg.limits.max_internal);
      });
      attempt += batch_size;
      for (auto &r : commit(batch)) {
        pop.push_back(std::move(r));
        ++added;
      }
    }
    sort_population(pop);
    if (static_cast<int>(pop.size()) > cfg.population_size) pop.resize(cfg.population_size);
  }
  if (pop.empty()) throw Error(ErrorCode::kInvalidArgument, "could not sample any route");

  int stall = 0;
  for (int gen = 1;; ++gen) {
    if (history.exhausted()) break;
    if (cfg.max_generations > 0 && gen > cfg.max_generations) break;

    std::vector<std::optional<SynthesisTree>> offspring(cfg.offspring_size);
    const int n = static_cast<int>(pop.size());
    parallel_for(cfg.offspring_size, cfg.workers, [&](int slot) {
      Rng rng(derive_seed(cfg.seed, kOffspringStream ^ static_cast<std::uint64_t>(gen) << 16,
                          static_cast<std::uint64_t>(slot)));
      const auto parents = inverse_rank_sample(n, std::min(2, n), rng);
      const SynthesisTree &t1 = pop[parents[0]].tree;
      const SynthesisTree &t2 = pop[parents.size() > 1 ? parents[1] : parents[0]].tree;
      std::optional<SynthesisTree> child;
      if (bernoulli(rng, cfg.crossover_rate)) {
        child = crossover(t1, t2, ctx, rng);
        if (child && bernoulli(rng, cfg.mutation_rate))
          child = mutate(*child, ctx, cfg.mutation_weights, rng);
      } else {
        child = mutate(t1, ctx, cfg.mutation_weights, rng);
      }
      offspring[slot] = std::move(child);
    });

    auto added = commit(offspring);
    const int n_added = static_cast<int>(added.size());
    for (auto &r : added) pop.push_back(std::move(r));
    sort_population(pop);
    if (static_cast<int>(pop.size()) > cfg.population_size) pop.resize(cfg.population_size);
    result.generations = gen;

    if (hooks.on_generation) {
      GenerationStats s;
      s.generation = gen;
      s.evaluated = history.size();
      s.best = pop.front().fitness;
      const int top = std::min<int>(10, static_cast<int>(pop.size()));
      for (int i = 0; i < top; ++i) s.mean_top10 += pop[i].fitness / top;
      s.offspring_added = n_added;
      hooks.on_generation(s);
    }

    stall = n_added == 0 ? stall + 1 : 0;
    if (stall >= cfg.stall_generations) {
      result.stalled = true;
      break;
    }
  }
  return result;
}

}  // namespace synroute
