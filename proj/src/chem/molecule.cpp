//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/molecule.h"

#include <algorithm>
#include <utility>

namespace synroute::chem {

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  build_adjacency();
  perceive_ring_bonds();
}

void Molecule::build_adjacency() {
  const int n = num_atoms();
  offsets_.assign(n + 1, 0);
  for (const auto &b : bonds_) {
    ++offsets_[b.begin + 1];
    ++offsets_[b.end + 1];
  }
  for (int i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(offsets_[n]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int bi = 0; bi < num_bonds(); ++bi) {
    const auto &b = bonds_[bi];
    adjacency_[fill[b.begin]++] = {b.end, bi};
    adjacency_[fill[b.end]++] = {b.begin, bi};
  }
  // Neighbour order follows atom index so traversals are reproducible.
  for (int i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + offsets_[i],
              adjacency_.begin() + offsets_[i + 1],
              [](const Neighbor &x, const Neighbor &y) {
                return x.atom < y.atom || (x.atom == y.atom && x.bond < y.bond);
              });
  }
}

// A bond is in a ring iff it is not a bridge.
void Molecule::perceive_ring_bonds() {
  const int n = num_atoms();
  atom_ring_.assign(n, 0);
  bond_ring_.assign(num_bonds(), 0);

  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<char> bridge(num_bonds(), 0);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    int next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, -1, offsets_[root]});
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next < offsets_[f.atom + 1]) {
        const Neighbor nb = adjacency_[f.next++];
        if (nb.bond == f.parent_bond) continue;
        if (disc[nb.atom] < 0) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, offsets_[nb.atom]});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame &parent = stack.back();
          low[parent.atom] = std::min(low[parent.atom], low[done.atom]);
          if (low[done.atom] > disc[parent.atom]) bridge[done.parent_bond] = 1;
        }
      }
    }
  }

  for (int bi = 0; bi < num_bonds(); ++bi) {
    if (bridge[bi]) continue;
    bond_ring_[bi] = 1;
    atom_ring_[bonds_[bi].begin] = 1;
    atom_ring_[bonds_[bi].end] = 1;
  }
}

int Molecule::bond_sum(int i) const {
  int s = 0;
  for (const auto &nb : neighbors(i))
    s += valence_contribution(bonds_[nb.bond].order);
  return s;
}

int Molecule::total_hydrogens() const {
  int h = 0;
  for (const auto &a : atoms_) h += a.hydrogens;
  return h;
}

std::optional<int> Molecule::find_bond(int a, int b) const {
  for (const auto &nb : neighbors(a))
    if (nb.atom == b) return nb.bond;
  return std::nullopt;
}

bool Molecule::is_connected() const {
  if (atoms_.empty()) return true;
  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (const auto &nb : neighbors(a)) {
      if (seen[nb.atom]) continue;
      seen[nb.atom] = 1;
      ++count;
      stack.push_back(nb.atom);
    }
  }
  return count == num_atoms();
}

namespace {

bool aromatic_edge(const Molecule &mol, const Neighbor &nb) {
  return mol.bond(nb.bond).order == BondOrder::kAromatic
         && mol.atom(nb.atom).aromatic;
}

// Depth-limited search for a simple path from `cur` to `target` of length
// 4 or 5 (closing a 5- or 6-membered ring with the excluded bond).
bool find_ring_path(const Molecule &mol, int cur, int target, int excluded,
                    int depth, std::vector<char> &on_path) {
  for (const auto &nb : mol.neighbors(cur)) {
    if (nb.bond == excluded || !aromatic_edge(mol, nb)) continue;
    if (nb.atom == target) {
      if (depth + 1 == 4 || depth + 1 == 5) return true;
      continue;
    }
    if (on_path[nb.atom] || depth + 1 >= 5) continue;
    on_path[nb.atom] = 1;
    const bool found =
        find_ring_path(mol, nb.atom, target, excluded, depth + 1, on_path);
    on_path[nb.atom] = 0;
    if (found) return true;
  }
  return false;
}

}  // namespace

bool in_small_aromatic_ring(const Molecule &mol, int b) {
  const Bond &bond = mol.bond(b);
  if (bond.order != BondOrder::kAromatic || !mol.bond_in_ring(b)) return false;
  std::vector<char> on_path(mol.num_atoms(), 0);
  on_path[bond.begin] = 1;
  on_path[bond.end] = 1;
  return find_ring_path(mol, bond.begin, bond.end, b, 0, on_path);
}

std::optional<std::string> sanitize_problem(const Molecule &mol) {
  if (mol.empty()) return "empty molecule";
  for (int bi = 0; bi < mol.num_bonds(); ++bi) {
    const Bond &b = mol.bond(bi);
    if (b.begin == b.end) return "self-loop bond";
    if (b.begin < 0 || b.end < 0 || b.begin >= mol.num_atoms()
        || b.end >= mol.num_atoms())
      return "bond endpoint out of range";
  }
  for (int i = 0; i < mol.num_atoms(); ++i) {
    auto nbs = mol.neighbors(i);
    for (std::size_t k = 1; k < nbs.size(); ++k)
      if (nbs[k].atom == nbs[k - 1].atom) return "parallel bonds";
  }
  if (!mol.is_connected()) return "disconnected graph";

  for (int bi = 0; bi < mol.num_bonds(); ++bi) {
    const Bond &b = mol.bond(bi);
    if (b.order != BondOrder::kAromatic) continue;
    if (!mol.atom(b.begin).aromatic || !mol.atom(b.end).aromatic)
      return "aromatic bond between non-aromatic atoms";
    if (!in_small_aromatic_ring(mol, bi))
      return "aromatic bond outside a 5/6-membered aromatic ring";
  }

  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    if (a.hydrogens < 0) return "negative hydrogen count";
    if (a.aromatic) {
      if (!can_be_aromatic(a.element))
        return "element cannot be aromatic";
      bool has_aromatic_bond = false;
      for (const auto &nb : mol.neighbors(i))
        has_aromatic_bond |= mol.bond(nb.bond).order == BondOrder::kAromatic;
      if (!has_aromatic_bond) return "aromatic atom outside an aromatic ring";
    }
    if (!valence_ok(a.element, a.charge, a.aromatic,
                    mol.bond_sum(i) + a.hydrogens))
      return "valence violation on atom " + std::to_string(i) + " ("
             + std::string(element_symbol(a.element)) + ")";
  }
  return std::nullopt;
}

Molecule permute_atoms(const Molecule &mol, std::span<const int> order) {
  std::vector<int> new_index(mol.num_atoms());
  std::vector<Atom> atoms;
  atoms.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    new_index[order[i]] = static_cast<int>(i);
    atoms.push_back(mol.atom(order[i]));
  }
  std::vector<Bond> bonds;
  bonds.reserve(mol.num_bonds());
  for (const auto &b : mol.bonds())
    bonds.push_back({new_index[b.begin], new_index[b.end], b.order});
  return Molecule(std::move(atoms), std::move(bonds));
}

}  // namespace synroute::chem
