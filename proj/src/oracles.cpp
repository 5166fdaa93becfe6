//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/oracles.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synroute/chem/descriptors.h"
#include "synroute/chem/smiles.h"
#include "synroute/error.h"

namespace synroute {

Oracle::Oracle(std::string name, RouteFn fn, bool cache)
    : name_(std::move(name)), route_fn_(std::move(fn)), use_cache_(cache) { }

std::shared_ptr<Oracle> Oracle::from_molecule(std::string name, MoleculeFn fn, bool cache) {
  auto o = std::make_shared<Oracle>(std::move(name), nullptr, cache);
  o->mol_fn_ = std::move(fn);
  return o;
}

std::optional<double> Oracle::cached(const std::string &key) {
  if (!use_cache_) return std::nullopt;
  std::lock_guard lock(mutex_);
  auto it = cache_.find(key);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

double Oracle::store(const std::string &key, double v) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::kNumeric, name_ + " returned a non-finite score for " + key);
  if (!use_cache_) {
    ++calls_;
    return v;
  }
  std::lock_guard lock(mutex_);
  if (cache_.emplace(key, v).second) ++calls_;
  return cache_.at(key);
}

double Oracle::operator()(const SynthesisTree &tree) {
  if (auto v = cached(tree.key().text)) return *v;
  const double v = route_fn_ ? route_fn_(tree) : mol_fn_(tree.product());
  return store(tree.key().text, v);
}

double Oracle::score_molecule(const chem::Molecule &mol, const chem::CanonicalKey &key) {
  if (!mol_fn_)
    throw Error(ErrorCode::kInvalidArgument, name_ + " scores routes, not bare molecules");
  if (auto v = cached(key.text)) return *v;
  return store(key.text, mol_fn_(mol));
}

Fitness Oracle::as_fitness() {
  return [this](const SynthesisTree &t) { return (*this)(t); };
}

// ---- molecule oracles -----------------------------------------------------

namespace {

chem::CountFingerprint sim_fp(const chem::Molecule &m) {
  return chem::morgan_count_fp(m, chem::kMorganRadius, chem::kSimilarityFingerprintDim);
}

}  // namespace

AnalogScorer::AnalogScorer(const chem::Molecule &query) {
  fp_ = sim_fp(query);
  const chem::Molecule scaffold = chem::murcko_scaffold(query);
  scaffold_empty_ = scaffold.num_atoms() == 0;
  if (!scaffold_empty_) scaffold_fp_ = sim_fp(scaffold);
}

double AnalogScorer::operator()(const chem::Molecule &mol) const {
  const double morgan = chem::tanimoto(sim_fp(mol), fp_);
  const chem::Molecule scaffold = chem::murcko_scaffold(mol);
  const bool empty = scaffold.num_atoms() == 0;
  double scaffold_term;
  if (empty || scaffold_empty_) scaffold_term = empty && scaffold_empty_ ? 1.0 : 0.0;
  else scaffold_term = chem::tanimoto(sim_fp(scaffold), scaffold_fp_);
  return 0.9 * morgan + 0.1 * scaffold_term;
}

double analog_score(const chem::Molecule &mol, const chem::Molecule &query) {
  return AnalogScorer(query)(mol);
}

double formula_score(const chem::Molecule &mol, const std::map<std::string, int> &target) {
  double norm = 0;
  for (const auto &[el, n] : target) norm += std::abs(n);
  if (norm == 0) throw Error(ErrorCode::kInvalidArgument, "empty target formula");
  const auto counts = chem::formula_counts(mol);
  double dist = 0;
  for (const auto &[el, n] : target) {
    auto it = counts.find(el);
    dist += std::abs((it == counts.end() ? 0 : it->second) - n);
  }
  for (const auto &[el, n] : counts)
    if (!target.count(el)) dist += std::abs(n);
  return std::clamp(1.0 - dist / norm, 0.0, 1.0);
}

OraclePtr make_analog_oracle(const chem::Molecule &query) {
  auto scorer = std::make_shared<AnalogScorer>(query);
  return Oracle::from_molecule("analog", [scorer](const chem::Molecule &m) { return (*scorer)(m); });
}

OraclePtr make_formula_oracle(const std::map<std::string, int> &target) {
  return Oracle::from_molecule("formula",
                               [target](const chem::Molecule &m) { return formula_score(m, target); });
}

OraclePtr make_similarity_oracle(const chem::Molecule &target) {
  auto fp = std::make_shared<chem::CountFingerprint>(sim_fp(target));
  return Oracle::from_molecule(
      "similarity", [fp](const chem::Molecule &m) { return chem::tanimoto(sim_fp(m), *fp); });
}

AdditiveBlockOracle::AdditiveBlockOracle(int n_blocks, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x4144));
  weights_.resize(n_blocks);
  for (auto &w : weights_) w = uniform_real(rng);
}

double AdditiveBlockOracle::operator()(const SynthesisTree &tree) const {
  const auto leaves = tree.leaves();
  double sum = 0;
  for (int id : leaves) sum += weights_.at(id);
  return sum / static_cast<double>(leaves.size());
}

OraclePtr AdditiveBlockOracle::make_oracle() const {
  auto self = std::make_shared<AdditiveBlockOracle>(*this);
  return std::make_shared<Oracle>("additive",
                                  [self](const SynthesisTree &t) { return (*self)(t); });
}

OraclePtr make_oracle(const nlohmann::json &spec, const Catalog &catalog) {
  if (!spec.is_object() || !spec.contains("type"))
    throw Error(ErrorCode::kInvalidArgument, "oracle spec needs a \"type\"");
  const std::string type = spec.at("type").get<std::string>();
  auto only = [&](std::initializer_list<const char *> keys) {
    for (const auto &[k, v] : spec.items()) {
      if (k == "type") continue;
      if (std::none_of(keys.begin(), keys.end(), [&](const char *x) { return k == x; }))
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown key '" + k + "' for " + type + " oracle");
    }
  };
  auto required = [&](const char *key) {
    if (!spec.contains(key))
      throw Error(ErrorCode::kInvalidArgument, type + " oracle needs \"" + key + "\"");
    return spec.at(key).get<std::string>();
  };
  if (type == "analog") {
    only({"query"});
    return make_analog_oracle(chem::parse_smiles(required("query")));
  }
  if (type == "formula") {
    only({"formula"});
    return make_formula_oracle(chem::parse_formula(required("formula")));
  }
  if (type == "similarity") {
    only({"target"});
    return make_similarity_oracle(chem::parse_smiles(required("target")));
  }
  if (type == "additive") {
    only({"seed"});
    return AdditiveBlockOracle(catalog.size(), spec.value("seed", std::uint64_t {0}))
        .make_oracle();
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown oracle type '" + type + "'");
}

// ---- metrics --------------------------------------------------------------

double running_top_k_mean(const std::vector<double> &values, std::size_t t, int k) {
  t = std::min(t, values.size());
  if (t == 0 || k < 1) return 0.0;
  std::vector<double> head(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(t));
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(k), t);
  std::partial_sort(head.begin(), head.begin() + static_cast<std::ptrdiff_t>(m), head.end(),
                    std::greater<>());
  return std::accumulate(head.begin(), head.begin() + static_cast<std::ptrdiff_t>(m), 0.0)
         / static_cast<double>(m);
}

double top_k_auc(const std::vector<double> &values, int k, int interval, std::int64_t budget) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "top-k AUC of an empty history");
  if (interval < 1 || k < 1) throw Error(ErrorCode::kInvalidArgument, "k and interval must be >= 1");
  const std::int64_t b = budget > 0 ? budget : static_cast<std::int64_t>(values.size());
  std::vector<std::int64_t> nodes;
  for (std::int64_t t = interval; t < b; t += interval) nodes.push_back(t);
  nodes.push_back(b);

  // Incremental top-k over a min-heap. Means and areas are accumulated as
  // offsets from a reference value so a constant history is reproduced exactly.
  std::vector<double> heap;
  std::size_t consumed = 0;
  auto curve = [&](std::int64_t t) {
    const auto upto = std::min<std::size_t>(static_cast<std::size_t>(t), values.size());
    for (; consumed < upto; ++consumed) {
      const double v = values[consumed];
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(v);
        std::push_heap(heap.begin(), heap.end(), std::greater<>());
      } else if (v > heap.front()) {
        std::pop_heap(heap.begin(), heap.end(), std::greater<>());
        heap.back() = v;
        std::push_heap(heap.begin(), heap.end(), std::greater<>());
      }
    }
    const double ref = heap.front();
    double offset = 0;
    for (double h : heap) offset += h - ref;
    return ref + offset / static_cast<double>(heap.size());
  };

  std::vector<double> f;
  for (std::int64_t t : nodes) f.push_back(curve(t));
  const double last = f.back();
  double deficit = static_cast<double>(nodes.front()) * (last - f.front());
  for (std::size_t i = 1; i < nodes.size(); ++i)
    deficit += static_cast<double>(nodes[i] - nodes[i - 1]) * ((last - f[i - 1]) + (last - f[i])) / 2.0;
  return last - deficit / static_cast<double>(b);
}

Clustering greedy_cluster(const std::vector<chem::CountFingerprint> &fps, double cutoff) {
  Clustering c;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    int found = -1;
    for (std::size_t r = 0; r < c.representatives.size(); ++r) {
      if (chem::tanimoto(fps[i], fps[c.representatives[r]]) >= cutoff) {
        found = static_cast<int>(r);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(c.representatives.size());
      c.representatives.push_back(static_cast<int>(i));
    }
    c.assignment.push_back(found);
  }
  return c;
}

double mean_diversity(const std::vector<chem::CountFingerprint> &fps) {
  if (fps.size() < 2) return 0.0;
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < fps.size(); ++i)
    for (std::size_t j = i + 1; j < fps.size(); ++j, ++pairs)
      sum += 1.0 - chem::tanimoto(fps[i], fps[j]);
  return sum / static_cast<double>(pairs);
}

}  // namespace synroute
