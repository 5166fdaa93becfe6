//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_ELEMENT_H_
#define SYNROUTE_CHEM_ELEMENT_H_

#include <optional>
#include <span>
#include <string_view>

namespace synroute::chem {

// Supported elements, valued by atomic number.
enum class Element : unsigned char {
  kB = 5,
  kC = 6,
  kN = 7,
  kO = 8,
  kF = 9,
  kSi = 14,
  kP = 15,
  kS = 16,
  kCl = 17,
  kSe = 34,
  kBr = 35,
  kI = 53,
};

constexpr int atomic_number(Element e) { return static_cast<int>(e); }

std::optional<Element> element_from_atomic_number(int z);
std::optional<Element> element_from_symbol(std::string_view symbol);
std::string_view element_symbol(Element e);

// Standard atomic weight in Da.
double atomic_weight(Element e);
inline constexpr double kHydrogenWeight = 1.008;

// Permitted valences for an atom of element `e` carrying `charge`, using the
// isoelectronic shift (N+ behaves like C, O- like F, ...). Empty when the
// combination is not representable.
std::span<const int> permitted_valences(Element e, int charge);

// Valence check for a sanitized atom. `valence` is the bond-order sum
// (aromatic bonds counted as 1) plus attached hydrogens. Aromatic atoms get
// one extra unit from the ring pi system; lone-pair donors (pyrrole-type N,
// furan-type O/S) may also satisfy the table without it.
bool valence_ok(Element e, int charge, bool aromatic, int valence);

// True when the element may be written without brackets in SMILES.
bool is_organic_subset(Element e);

// True for elements that have a lowercase aromatic form (b, c, n, o, p, s).
bool can_be_aromatic(Element e);

// Hydrogens implied for an unbracketed atom with the given bond-order sum
// (aromatic bonds counted as 1). Returns nullopt when no permitted valence
// accommodates the bonds.
std::optional<int> implicit_hydrogens(Element e, bool aromatic, int bond_sum);

}  // namespace synroute::chem

#endif  // SYNROUTE_CHEM_ELEMENT_H_
