//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/element.h"

#include <algorithm>
#include <array>

namespace synroute::chem {
namespace {

struct ElementInfo {
  Element element;
  std::string_view symbol;
  // IUPAC standard atomic weights (abridged, 2021 CIAAW table).
  double weight;
  bool organic;
  bool aromatic_form;
};

constexpr std::array<ElementInfo, 12> kElements = {{
    {Element::kB, "B", 10.81, true, true},
    {Element::kC, "C", 12.011, true, true},
    {Element::kN, "N", 14.007, true, true},
    {Element::kO, "O", 15.999, true, true},
    {Element::kF, "F", 18.998, true, false},
    {Element::kSi, "Si", 28.085, false, false},
    {Element::kP, "P", 30.974, true, true},
    {Element::kS, "S", 32.06, true, true},
    {Element::kCl, "Cl", 35.45, true, false},
    {Element::kSe, "Se", 78.971, false, false},
    {Element::kBr, "Br", 79.904, true, false},
    {Element::kI, "I", 126.90, true, false},
}};

const ElementInfo &info(Element e) {
  for (const auto &ei : kElements)
    if (ei.element == e) return ei;
  return kElements[1];
}

// Valence tables by atomic number; includes the neighbours reached by the
// isoelectronic charge shift.
std::span<const int> valences_for_z(int z) {
  static constexpr std::array<int, 1> k0 = {0};
  static constexpr std::array<int, 1> k1 = {1};
  static constexpr std::array<int, 1> k2 = {2};
  static constexpr std::array<int, 1> k3 = {3};
  static constexpr std::array<int, 1> k4 = {4};
  static constexpr std::array<int, 2> k35 = {3, 5};
  static constexpr std::array<int, 3> k246 = {2, 4, 6};
  static constexpr std::array<int, 3> k135 = {1, 3, 5};

  switch (z) {
  case 4:  // Be
    return k2;
  case 5:  // B
  case 13:  // Al
    return k3;
  case 6:  // C
  case 14:  // Si
  case 32:  // Ge
    return k4;
  case 7:  // N
  case 15:  // P
  case 33:  // As
  case 51:  // Sb
    return k35;
  case 8:  // O
    return k2;
  case 16:  // S
  case 34:  // Se
  case 52:  // Te
    return k246;
  case 9:  // F
  case 17:  // Cl
  case 35:  // Br
    return k1;
  case 53:  // I
    return k135;
  case 10:
  case 18:
  case 36:
  case 54:
    return k0;
  default:
    return {};
  }
}

enum class ValenceGroup { kPiOnly, kDonorOrPi, kDonorOnly, kOther };

ValenceGroup group_for_z(int z) {
  switch (z) {
  case 5:
  case 6:
  case 13:
  case 14:
  case 32:
    return ValenceGroup::kPiOnly;
  case 7:
  case 15:
  case 33:
  case 51:
    return ValenceGroup::kDonorOrPi;
  case 8:
  case 16:
  case 34:
  case 52:
    return ValenceGroup::kDonorOnly;
  default:
    return ValenceGroup::kOther;
  }
}

bool contains(std::span<const int> vs, int v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

}  // namespace

std::optional<Element> element_from_atomic_number(int z) {
  for (const auto &ei : kElements)
    if (atomic_number(ei.element) == z) return ei.element;
  return std::nullopt;
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (const auto &ei : kElements)
    if (ei.symbol == symbol) return ei.element;
  return std::nullopt;
}

std::string_view element_symbol(Element e) { return info(e).symbol; }

double atomic_weight(Element e) { return info(e).weight; }

std::span<const int> permitted_valences(Element e, int charge) {
  return valences_for_z(atomic_number(e) - charge);
}

bool valence_ok(Element e, int charge, bool aromatic, int valence) {
  const int z = atomic_number(e) - charge;
  auto vs = valences_for_z(z);
  if (vs.empty()) return false;
  if (!aromatic) return contains(vs, valence);

  switch (group_for_z(z)) {
  case ValenceGroup::kPiOnly:
    return contains(vs, valence + 1);
  case ValenceGroup::kDonorOrPi:
    return contains(vs, valence) || contains(vs, valence + 1);
  case ValenceGroup::kDonorOnly:
    return contains(vs, valence);
  default:
    return false;
  }
}

bool is_organic_subset(Element e) { return info(e).organic; }

bool can_be_aromatic(Element e) { return info(e).aromatic_form; }

std::optional<int> implicit_hydrogens(Element e, bool aromatic, int bond_sum) {
  auto vs = valences_for_z(atomic_number(e));
  if (vs.empty()) return std::nullopt;
  if (aromatic) return std::max(0, vs.front() - (bond_sum + 1));
  for (int v : vs)
    if (v >= bond_sum) return v - bond_sum;
  return std::nullopt;
}

}  // namespace synroute::chem
