//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_SMARTS_H_
#define SYNROUTE_CHEM_SMARTS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synroute/chem/molecule.h"

namespace synroute::chem {

enum class AtomOp {
  kAny,
  kAtomicNumber,
  kAromatic,
  kAliphatic,
  kHydrogens,
  kDegree,
  kCharge,
  kInRing,
  kNot,
  kAnd,
  kOr,
};

struct AtomExpr {
  AtomOp op = AtomOp::kAny;
  int value = 0;
  std::vector<AtomExpr> children;

  bool matches(const Molecule &mol, int atom) const;
};

enum class BondQuery {
  kSingleOrAromatic,  // unspecified bond between two pattern atoms
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
  kAny,
};

bool bond_query_matches(BondQuery q, BondOrder order);

// Concrete atom properties implied by a pattern atom's top-level conjunction.
// Used when a product pattern creates or edits atoms.
struct AtomSpec {
  std::optional<Element> element;
  std::optional<bool> aromatic;
  std::optional<int> charge;
  std::optional<int> hydrogens;
};

struct PatternAtom {
  AtomExpr expr;
  int map = 0;  // 0 = unmapped
  AtomSpec spec;
};

struct PatternBond {
  int begin;
  int end;
  BondQuery query;
};

class Pattern {
public:
  Pattern() = default;
  Pattern(std::vector<PatternAtom> atoms, std::vector<PatternBond> bonds);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  const PatternAtom &atom(int i) const { return atoms_[i]; }
  const PatternBond &bond(int b) const { return bonds_[b]; }
  const std::vector<PatternAtom> &atoms() const { return atoms_; }
  const std::vector<PatternBond> &bonds() const { return bonds_; }

  // Pattern atom carrying map index `map`, or -1.
  int find_map(int map) const;
  std::optional<int> find_bond(int a, int b) const;
  const std::vector<std::pair<int, int>> &neighbors(int i) const {
    return adjacency_[i];
  }

  const std::string &text() const { return text_; }
  void set_text(std::string t) { text_ = std::move(t); }

private:
  std::vector<PatternAtom> atoms_;
  std::vector<PatternBond> bonds_;
  // (neighbour atom, bond index) per atom
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
  std::string text_;
};

// Parses one connected SMARTS pattern (no '.'). Throws ParseError.
Pattern parse_smarts(std::string_view text);

// Every injective mapping of pattern atoms onto molecule atoms that satisfies
// atom and bond constraints. Entry i of a mapping is the molecule atom for
// pattern atom i; mappings are sorted lexicographically.
std::vector<std::vector<int>> match_pattern(const Pattern &p,
                                            const Molecule &mol);

bool has_match(const Pattern &p, const Molecule &mol);

}  // namespace synroute::chem

#endif  // SYNROUTE_CHEM_SMARTS_H_
