//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_RANDOM_H_
#define SYNROUTE_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace synroute {

// The engine is fixed by the standard; the distributions below are written
// out so that draws are identical across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

// Uniform integer in [lo, hi] by rejection.
inline std::int64_t uniform_int(Rng &rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return lo + static_cast<std::int64_t>(rng());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

inline std::size_t uniform_index(Rng &rng, std::size_t n) {
  return static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng &rng, double p) { return uniform_real(rng) < p; }

// Standard normal via Box-Muller (one value per call).
inline double standard_normal(Rng &rng) {
  double u1;
  do {
    u1 = uniform_real(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform_real(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Index drawn with probability proportional to weights (all >= 0, sum > 0).
inline std::size_t weighted_index(Rng &rng, const std::vector<double> &weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform_real(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0) return i;
  return 0;
}

template <class T>
void shuffle(Rng &rng, std::vector<T> &v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace synroute

#endif  // SYNROUTE_RANDOM_H_
