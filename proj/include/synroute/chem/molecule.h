//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_MOLECULE_H_
#define SYNROUTE_CHEM_MOLECULE_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synroute/chem/element.h"

namespace synroute::chem {

enum class BondOrder : unsigned char {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Contribution of a bond to an atom's valence; aromatic bonds count as 1 and
// the ring pi electron is accounted for in valence_ok().
constexpr int valence_contribution(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

struct Atom {
  Element element = Element::kC;
  int charge = 0;
  bool aromatic = false;
  int hydrogens = 0;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

// Heavy-atom molecular graph with explicit hydrogen counts. Adjacency and
// ring membership are computed on construction; the object is not modified
// afterwards.
class Molecule {
public:
  Molecule() = default;
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int b) const { return bonds_[b]; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int i) const {
    return {adjacency_.data() + offsets_[i],
            adjacency_.data() + offsets_[i + 1]};
  }
  int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }

  // Bond-order sum with aromatic bonds counted as 1.
  int bond_sum(int i) const;
  int total_hydrogens() const;

  std::optional<int> find_bond(int a, int b) const;

  bool atom_in_ring(int i) const { return atom_ring_[i] != 0; }
  bool bond_in_ring(int b) const { return bond_ring_[b] != 0; }

  bool is_connected() const;

private:
  void build_adjacency();
  void perceive_ring_bonds();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> offsets_ = {0};
  std::vector<Neighbor> adjacency_;
  std::vector<char> atom_ring_;
  std::vector<char> bond_ring_;
};

using MolPtr = std::shared_ptr<const Molecule>;

// True when bond `b` lies on a 5- or 6-membered cycle made only of aromatic
// atoms joined by aromatic bonds.
bool in_small_aromatic_ring(const Molecule &mol, int b);

// Returns a description of the first sanitization failure, or nullopt when
// the graph is a valid molecule: connected, simple, aromatic bonds only
// between aromatic atoms and inside 5/6-membered aromatic rings, and every
// atom within its valence table.
std::optional<std::string> sanitize_problem(const Molecule &mol);

// Relabels atoms so that new index i holds old atom order[i].
Molecule permute_atoms(const Molecule &mol, std::span<const int> order);

}  // namespace synroute::chem

#endif  // SYNROUTE_CHEM_MOLECULE_H_
