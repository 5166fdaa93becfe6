//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_SMILES_H_
#define SYNROUTE_CHEM_SMILES_H_

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synroute/chem/molecule.h"

namespace synroute::chem {

// Canonical linear notation; equal for isomorphic graphs.
struct CanonicalKey {
  std::string text;

  auto operator<=>(const CanonicalKey &) const = default;
  bool empty() const { return text.empty(); }
};

// Parses the supported SMILES subset: organic-subset and bracket atoms,
// single/double/triple/aromatic bonds, branches, ring closures (1-9, %nn).
// Stereo marks, isotopes, atom maps and '.' are rejected. Hydrogens of
// unbracketed atoms are inferred once here.
//
// Throws ParseError (with offset) on syntax errors and unclosed rings, and
// Error{kValence} when the resulting graph fails sanitization.
Molecule parse_smiles(std::string_view text);

// Canonical atom ranks (a permutation of 0..n-1).
std::vector<int> canonical_ranks(const Molecule &mol);

// Writes SMILES using the given atom ranks to order the traversal.
std::string write_smiles(const Molecule &mol, std::span<const int> ranks);

CanonicalKey canonical_key(const Molecule &mol);

}  // namespace synroute::chem

template <>
struct std::hash<synroute::chem::CanonicalKey> {
  std::size_t operator()(const synroute::chem::CanonicalKey &k) const noexcept {
    return std::hash<std::string>()(k.text);
  }
};

#endif  // SYNROUTE_CHEM_SMILES_H_
