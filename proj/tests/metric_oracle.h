//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_TESTS_METRIC_ORACLE_H_
#define SYNROUTE_TESTS_METRIC_ORACLE_H_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "synroute/chem/fingerprint.h"

namespace synroute::testing {

// Direct evaluation of the trapezoid rule with an O(n^2) curve.
inline double auc_oracle(const std::vector<double> &v, int k, int interval, std::int64_t b) {
  auto f = [&](std::int64_t t) {
    std::vector<double> head(v.begin(), v.begin() + std::min<std::int64_t>(t, v.size()));
    std::sort(head.rbegin(), head.rend());
    const std::size_t m = std::min<std::size_t>(k, head.size());
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += head[i];
    return s / m;
  };
  std::vector<std::int64_t> t {0};
  for (std::int64_t x = interval; x < b; x += interval) t.push_back(x);
  t.push_back(b);
  double area = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double left = i == 1 ? f(t[1]) : f(t[i - 1]);
    area += (t[i] - t[i - 1]) * (left + f(t[i])) / 2;
  }
  return area / b;
}

// A molecule founds a cluster iff no earlier founder is within the cutoff;
// otherwise it joins the earliest such founder. Returns founder per molecule.
inline std::vector<int> founder_scan(const std::vector<chem::CountFingerprint> &fps, double cutoff) {
  std::vector<int> founder_of(fps.size(), -1);
  std::vector<int> founders;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    for (int f : founders)
      if (chem::tanimoto(fps[i], fps[f]) >= cutoff) {
        founder_of[i] = f;
        break;
      }
    if (founder_of[i] < 0) {
      founder_of[i] = static_cast<int>(i);
      founders.push_back(static_cast<int>(i));
    }
  }
  return founder_of;
}

}  // namespace synroute::testing

#endif  // SYNROUTE_TESTS_METRIC_ORACLE_H_
