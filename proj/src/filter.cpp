//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/filter.h"

#include <algorithm>

#include "synroute/error.h"

namespace synroute {

const char *filter_kind_name(FilterKind kind) {
  switch (kind) {
  case FilterKind::kNone:
    return "none";
  case FilterKind::kSim:
    return "sim";
  case FilterKind::kClassifier:
    return "classifier";
  case FilterKind::kNam:
    return "nam";
  }
  return "none";
}

BlockFilter BlockFilter::from_ids(std::vector<int> ids, double epsilon,
                                  FilterKind kind) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in [0, 1]");
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return BlockFilter {std::move(ids), epsilon, kind};
}

bool BlockFilter::contains(int id) const {
  return std::binary_search(ids.begin(), ids.end(), id);
}

namespace {

std::optional<int> first_accepted(std::vector<int> candidates, Rng &rng,
                                  const std::function<bool(int)> &accept) {
  while (!candidates.empty()) {
    const std::size_t k = uniform_index(rng, candidates.size());
    const int id = candidates[k];
    if (!accept || accept(id)) return id;
    candidates[k] = candidates.back();
    candidates.pop_back();
  }
  return std::nullopt;
}

}  // namespace

std::optional<FilteredDraw> sample_filtered(const std::vector<int> &space,
                                            const BlockFilter *filter, Rng &rng,
                                            const std::function<bool(int)> &accept) {
  if (filter && !filter->empty() && !bernoulli(rng, filter->epsilon)) {
    std::vector<int> inter;
    for (int id : space)
      if (filter->contains(id)) inter.push_back(id);
    if (auto id = first_accepted(std::move(inter), rng, accept))
      return FilteredDraw {*id, false};
  }
  if (auto id = first_accepted(space, rng, accept)) return FilteredDraw {*id, true};
  return std::nullopt;
}

FilteredDraw epsilon_sample(const std::vector<int> &space, const BlockFilter &filter,
                            Rng &rng) {
  if (space.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sampling space");
  return *sample_filtered(space, &filter, rng);
}

}  // namespace synroute
