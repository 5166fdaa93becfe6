//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/descriptors.h"

#include <cctype>

#include "synroute/error.h"

namespace synroute::chem {

Molecule murcko_scaffold(const Molecule &mol) {
  const int n = mol.num_atoms();
  std::vector<char> alive(n, 1);
  std::vector<int> degree(n);
  std::vector<Atom> atoms(mol.atoms().begin(), mol.atoms().end());
  bool any_ring = false;
  for (int i = 0; i < n; ++i) {
    degree[i] = mol.degree(i);
    any_ring |= mol.atom_in_ring(i);
  }
  if (!any_ring) return {};

  std::vector<int> stack;
  for (int i = 0; i < n; ++i)
    if (!mol.atom_in_ring(i) && degree[i] <= 1) stack.push_back(i);
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (!alive[u]) continue;
    alive[u] = 0;
    for (const auto &nb : mol.neighbors(u)) {
      if (!alive[nb.atom]) continue;
      atoms[nb.atom].hydrogens += valence_contribution(mol.bond(nb.bond).order);
      if (--degree[nb.atom] <= 1 && !mol.atom_in_ring(nb.atom))
        stack.push_back(nb.atom);
    }
  }

  std::vector<int> index(n, -1);
  std::vector<Atom> kept;
  for (int i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    index[i] = static_cast<int>(kept.size());
    kept.push_back(atoms[i]);
  }
  std::vector<Bond> bonds;
  for (const auto &b : mol.bonds())
    if (alive[b.begin] && alive[b.end])
      bonds.push_back({index[b.begin], index[b.end], b.order});
  return Molecule(std::move(kept), std::move(bonds));
}

double molecular_weight(const Molecule &mol) {
  double w = 0.0;
  for (const auto &a : mol.atoms())
    w += atomic_weight(a.element) + a.hydrogens * kHydrogenWeight;
  return w;
}

std::map<std::string, int> formula_counts(const Molecule &mol) {
  std::map<std::string, int> counts;
  int h = 0;
  for (const auto &a : mol.atoms()) {
    ++counts[std::string(element_symbol(a.element))];
    h += a.hydrogens;
  }
  if (h > 0) counts["H"] = h;
  return counts;
}

std::map<std::string, int> parse_formula(std::string_view text) {
  std::map<std::string, int> counts;
  std::size_t pos = 0;
  if (text.empty()) throw ParseError(0, "empty formula");
  while (pos < text.size()) {
    if (!std::isupper(static_cast<unsigned char>(text[pos])))
      throw ParseError(pos, "expected element symbol");
    std::string sym(1, text[pos++]);
    if (pos < text.size() && std::islower(static_cast<unsigned char>(text[pos])))
      sym.push_back(text[pos++]);
    if (sym != "H" && !element_from_symbol(sym))
      throw ParseError(pos - sym.size(), "unsupported element " + sym);
    int n = 0;
    bool digits = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      n = n * 10 + (text[pos++] - '0');
      digits = true;
    }
    counts[sym] += digits ? n : 1;
  }
  return counts;
}

}  // namespace synroute::chem
