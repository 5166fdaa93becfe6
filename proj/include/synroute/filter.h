//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_FILTER_H_
#define SYNROUTE_FILTER_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "synroute/random.h"

namespace synroute {

enum class FilterKind { kNone, kSim, kClassifier, kNam };

const char *filter_kind_name(FilterKind kind);

// Filtered block subset F with fallback probability epsilon.
struct BlockFilter {
  std::vector<int> ids;  // sorted
  double epsilon = 0.1;
  FilterKind kind = FilterKind::kNone;

  static BlockFilter from_ids(std::vector<int> ids, double epsilon, FilterKind kind);
  bool contains(int id) const;
  bool empty() const { return ids.empty(); }
};

// Outcome of one filtered draw, with the branch that produced it.
struct FilteredDraw {
  int id = -1;
  bool fallback = false;  // drawn from the unfiltered space
};

// Draws from the subset of `space` accepted by `accept`: with probability
// 1 - epsilon uniformly from accepted ids inside the filter (when any exist),
// otherwise uniformly from all accepted ids. Candidates are tested lazily in
// random order, so `accept` only runs until a hit is found. Returns nullopt
// when no id in `space` is accepted. A null filter means no filtering.
std::optional<FilteredDraw> sample_filtered(
    const std::vector<int> &space, const BlockFilter *filter, Rng &rng,
    const std::function<bool(int)> &accept = {});

// Plain two-branch rule over a nonempty space.
FilteredDraw epsilon_sample(const std::vector<int> &space, const BlockFilter &filter,
                            Rng &rng);

}  // namespace synroute

#endif  // SYNROUTE_FILTER_H_
