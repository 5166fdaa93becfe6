//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_FINGERPRINT_H_
#define SYNROUTE_CHEM_FINGERPRINT_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "synroute/chem/molecule.h"

namespace synroute::chem {

inline constexpr int kModelFingerprintDim = 2048;
inline constexpr int kSimilarityFingerprintDim = 4096;
inline constexpr int kMorganRadius = 2;

// Sparse folded count vector; entries sorted by index, counts >= 1.
struct CountFingerprint {
  int dim = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

  bool empty() const { return entries.empty(); }
  std::uint64_t l1() const;
  friend bool operator==(const CountFingerprint &, const CountFingerprint &) = default;
};

// Environment identifiers: ids[r][atom] for r = 0..radius.
std::vector<std::vector<std::uint64_t>> morgan_atom_ids(const Molecule &mol,
                                                       int radius);

CountFingerprint morgan_count_fp(const Molecule &mol,
                                 int radius = kMorganRadius,
                                 int dim = kModelFingerprintDim);

CountFingerprint make_fingerprint(
    int dim, std::vector<std::pair<std::uint32_t, std::uint32_t>> entries);

// ||min(x,y)||_1 / ||max(x,y)||_1; 0 when both are empty.
double tanimoto(const CountFingerprint &x, const CountFingerprint &y);

// ||min(x,y)||_1 and ||max(x,y)||_1 in one pass.
std::pair<std::uint64_t, std::uint64_t> min_max_sums(const CountFingerprint &x,
                                                     const CountFingerprint &y);

// ||min(b,q)||_1 / ||b||_1: share of b's environments present in q.
double containment(const CountFingerprint &b, const CountFingerprint &q);

void to_dense(const CountFingerprint &fp, float *out);

}  // namespace synroute::chem

#endif  // SYNROUTE_CHEM_FINGERPRINT_H_
