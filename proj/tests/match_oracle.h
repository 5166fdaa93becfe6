//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_TESTS_MATCH_ORACLE_H_
#define SYNROUTE_TESTS_MATCH_ORACLE_H_

#include <vector>

#include "synroute/chem/smarts.h"

namespace synroute::testing {

// Independent primitive evaluator over the parsed expression tree.
inline bool oracle_atom(const chem::AtomExpr &e, const chem::Molecule &m, int i) {
  using chem::AtomOp;
  const auto &a = m.atom(i);
  switch (e.op) {
  case AtomOp::kAny: return true;
  case AtomOp::kAtomicNumber: return static_cast<int>(a.element) == e.value;
  case AtomOp::kAromatic: return a.aromatic;
  case AtomOp::kAliphatic: return !a.aromatic;
  case AtomOp::kHydrogens: return a.hydrogens == e.value;
  case AtomOp::kDegree: return static_cast<int>(m.neighbors(i).size()) == e.value;
  case AtomOp::kCharge: return a.charge == e.value;
  case AtomOp::kInRing: {
    bool ring = false;
    for (const auto &nb : m.neighbors(i)) ring |= m.bond_in_ring(nb.bond);
    return ring == (e.value != 0);
  }
  case AtomOp::kNot: return !oracle_atom(e.children[0], m, i);
  case AtomOp::kAnd:
    for (const auto &c : e.children) if (!oracle_atom(c, m, i)) return false;
    return true;
  case AtomOp::kOr:
    for (const auto &c : e.children) if (oracle_atom(c, m, i)) return true;
    return false;
  }
  return false;
}

inline bool oracle_bond(chem::BondQuery q, int order) {
  using chem::BondQuery;
  switch (q) {
  case BondQuery::kSingleOrAromatic: return order == 1 || order == 4;
  case BondQuery::kSingle: return order == 1;
  case BondQuery::kDouble: return order == 2;
  case BondQuery::kTriple: return order == 3;
  case BondQuery::kAromatic: return order == 4;
  case BondQuery::kAny: return true;
  }
  return false;
}

// Enumerates every injective assignment in lexicographic order and keeps the
// ones satisfying all constraints; no pruning beyond injectivity.
inline std::vector<std::vector<int>> brute_force_matches(const chem::Pattern &p,
                                                         const chem::Molecule &m) {
  const int k = p.num_atoms();
  const int n = m.num_atoms();
  std::vector<std::vector<int>> out;
  if (k > n) return out;
  std::vector<int> assign(k, 0);
  auto valid = [&]() {
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (assign[i] == assign[j]) return false;
    for (int i = 0; i < k; ++i)
      if (!oracle_atom(p.atom(i).expr, m, assign[i])) return false;
    for (const auto &b : p.bonds()) {
      auto mb = m.find_bond(assign[b.begin], assign[b.end]);
      if (!mb || !oracle_bond(b.query, static_cast<int>(m.bond(*mb).order)))
        return false;
    }
    return true;
  };
  while (true) {
    if (valid()) out.push_back(assign);
    int pos = k - 1;
    while (pos >= 0 && ++assign[pos] == n) assign[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

}  // namespace synroute::testing

#endif  // SYNROUTE_TESTS_MATCH_ORACLE_H_
