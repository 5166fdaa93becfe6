//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_TESTS_GRAPH_ORACLE_H_
#define SYNROUTE_TESTS_GRAPH_ORACLE_H_

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "synroute/chem/molecule.h"

namespace synroute::testing {

// Plain backtracking isomorphism test, independent of canonical ranking.
inline bool isomorphic(const chem::Molecule &a, const chem::Molecule &b) {
  const int n = a.num_atoms();
  if (n != b.num_atoms() || a.num_bonds() != b.num_bonds()) return false;
  std::vector<int> map(n, -1), used(n, 0);

  auto bond_order = [](const chem::Molecule &m, int x, int y) -> int {
    auto bi = m.find_bond(x, y);
    return bi ? static_cast<int>(m.bond(*bi).order) : 0;
  };

  auto rec = [&](auto &&self, int i) -> bool {
    if (i == n) return true;
    for (int j = 0; j < n; ++j) {
      if (used[j] || !(a.atom(i) == b.atom(j)) || a.degree(i) != b.degree(j))
        continue;
      bool ok = true;
      for (int k = 0; k < i && ok; ++k)
        ok = bond_order(a, i, k) == bond_order(b, j, map[k]);
      if (!ok) continue;
      used[j] = 1;
      map[i] = j;
      if (self(self, i + 1)) return true;
      used[j] = 0;
      map[i] = -1;
    }
    return false;
  };
  return rec(rec, 0);
}

inline chem::Molecule shuffled(const chem::Molecule &m, std::mt19937_64 &rng) {
  std::vector<int> order(m.num_atoms());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return chem::permute_atoms(m, order);
}

}  // namespace synroute::testing

#endif  // SYNROUTE_TESTS_GRAPH_ORACLE_H_
