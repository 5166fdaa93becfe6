//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/smiles.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <utility>

#include "synroute/error.h"

namespace synroute::chem {
namespace {

bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':';
}

BondOrder bond_from_char(char c) {
  switch (c) {
  case '=':
    return BondOrder::kDouble;
  case '#':
    return BondOrder::kTriple;
  case ':':
    return BondOrder::kAromatic;
  default:
    return BondOrder::kSingle;
  }
}

struct ParsedAtom {
  Atom atom;
  bool bracket = false;
};

struct ParsedBond {
  int begin;
  int end;
  std::optional<BondOrder> order;
};

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
  std::size_t position;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text): s_(text) { }

  Molecule parse() {
    if (s_.empty()) throw ParseError(0, "empty SMILES");

    int prev = -1;
    std::optional<BondOrder> pending;
    std::vector<int> branches;

    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev < 0) fail("branch without a preceding atom");
        if (pending) fail("bond symbol before branch");
        branches.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty()) fail("unbalanced ')'");
        if (pending) fail("dangling bond symbol");
        if (s_[pos_ - 1] == '(') fail("empty branch");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (is_bond_char(c)) {
        if (prev < 0) fail("bond symbol without a preceding atom");
        if (pending) fail("consecutive bond symbols");
        pending = bond_from_char(c);
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure without a preceding atom");
        const std::size_t start = pos_;
        const int label = ring_label();
        handle_ring(label, prev, pending, start);
        pending.reset();
      } else if (c == '.') {
        fail("multi-fragment SMILES ('.') is not supported");
      } else if (c == '@' || c == '/' || c == '\\') {
        fail("stereochemistry is not supported");
      } else {
        const int idx = parse_atom();
        if (prev >= 0) add_bond(prev, idx, pending);
        else if (pending) fail("bond symbol before the first atom");
        pending.reset();
        prev = idx;
      }
    }

    if (pending) throw ParseError(s_.size(), "dangling bond symbol");
    if (!branches.empty()) throw ParseError(s_.size(), "unclosed branch");
    if (!rings_.empty())
      throw ParseError(rings_.begin()->second.position, "unclosed ring bond");

    return build();
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(pos_, msg);
  }

  int ring_label() {
    if (s_[pos_] != '%') return s_[pos_++] - '0';
    ++pos_;
    if (pos_ + 2 > s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))
        || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))
      fail("expected two digits after '%'");
    const int label = (s_[pos_] - '0') * 10 + (s_[pos_ + 1] - '0');
    pos_ += 2;
    return label;
  }

  void handle_ring(int label, int atom, std::optional<BondOrder> order,
                   std::size_t start) {
    auto it = rings_.find(label);
    if (it == rings_.end()) {
      rings_.emplace(label, RingOpening {atom, order, start});
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == atom) throw ParseError(start, "ring closure to itself");
    if (open.order && order && *open.order != *order)
      throw ParseError(start, "conflicting ring-closure bond symbols");
    add_bond(open.atom, atom, order ? order : open.order);
  }

  void add_bond(int a, int b, std::optional<BondOrder> order) {
    for (const auto &bond : bonds_) {
      if ((bond.begin == a && bond.end == b)
          || (bond.begin == b && bond.end == a))
        fail("duplicate bond between the same atoms");
    }
    bonds_.push_back({a, b, order});
  }

  int push_atom(Element e, bool aromatic, bool bracket, int h, int charge) {
    ParsedAtom pa;
    pa.atom.element = e;
    pa.atom.aromatic = aromatic;
    pa.atom.hydrogens = h;
    pa.atom.charge = charge;
    pa.bracket = bracket;
    atoms_.push_back(pa);
    return static_cast<int>(atoms_.size()) - 1;
  }

  int parse_atom() {
    const char c = s_[pos_];
    if (c == '[') return parse_bracket_atom();

    auto two = s_.substr(pos_, 2);
    if (two == "Cl" || two == "Br") {
      pos_ += 2;
      return push_atom(*element_from_symbol(two), false, false, 0, 0);
    }
    switch (c) {
    case 'B':
    case 'C':
    case 'N':
    case 'O':
    case 'P':
    case 'S':
    case 'F':
    case 'I': {
      ++pos_;
      return push_atom(*element_from_symbol(std::string_view(&c, 1)), false,
                       false, 0, 0);
    }
    case 'b':
    case 'c':
    case 'n':
    case 'o':
    case 'p':
    case 's': {
      ++pos_;
      const char up = static_cast<char>(std::toupper(c));
      return push_atom(*element_from_symbol(std::string_view(&up, 1)), true,
                       false, 0, 0);
    }
    default:
      break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)))
      fail("unsupported element");
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_bracket_atom() {
    ++pos_;  // '['
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("isotopes are not supported");
    if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_])))
      fail("expected element symbol");

    bool aromatic = false;
    std::string symbol;
    const char c = s_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      symbol.push_back(c);
      ++pos_;
      if (pos_ < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_])))
        symbol.push_back(s_[pos_++]);
    } else {
      // Lowercase aromatic symbol; two-letter aromatic forms (se, as) are
      // outside the supported subset.
      symbol.push_back(static_cast<char>(std::toupper(c)));
      ++pos_;
      aromatic = true;
      if (pos_ < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_])))
        fail("unsupported aromatic element");
    }
    auto element = element_from_symbol(symbol);
    if (!element) fail("unsupported element '" + symbol + "'");
    if (aromatic && !can_be_aromatic(*element))
      fail("element cannot be aromatic");

    int h = 0;
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      h = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        h = s_[pos_++] - '0';
    }

    int charge = 0;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign_char = s_[pos_];
      const int sign = sign_char == '+' ? 1 : -1;
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        charge = sign * (s_[pos_++] - '0');
      } else {
        charge = sign;
        while (pos_ < s_.size() && s_[pos_] == sign_char) {
          charge += sign;
          ++pos_;
        }
      }
    }

    if (pos_ < s_.size() && s_[pos_] == '@')
      fail("stereochemistry is not supported");
    if (pos_ < s_.size() && s_[pos_] == ':')
      fail("atom maps are not supported in SMILES");
    if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ']'");
    ++pos_;
    return push_atom(*element, aromatic, true, h, charge);
  }

  Molecule build() {
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto &pa : atoms_) atoms.push_back(pa.atom);

    std::vector<Bond> bonds;
    bonds.reserve(bonds_.size());
    for (const auto &pb : bonds_) {
      BondOrder order = BondOrder::kSingle;
      if (pb.order) order = *pb.order;
      else if (atoms[pb.begin].aromatic && atoms[pb.end].aromatic)
        order = BondOrder::kAromatic;
      bonds.push_back({pb.begin, pb.end, order});
    }

    // Aromatic bonds that do not close a 5/6-membered aromatic ring are
    // ordinary single bonds (e.g. the biaryl link in c1ccccc1c1ccccc1).
    {
      Molecule tentative(atoms, bonds);
      for (int bi = 0; bi < tentative.num_bonds(); ++bi) {
        if (bonds[bi].order == BondOrder::kAromatic
            && atoms[bonds[bi].begin].aromatic && atoms[bonds[bi].end].aromatic
            && !in_small_aromatic_ring(tentative, bi))
          bonds[bi].order = BondOrder::kSingle;
      }
    }

    std::vector<int> bond_sum(atoms.size(), 0);
    for (const auto &b : bonds) {
      bond_sum[b.begin] += valence_contribution(b.order);
      bond_sum[b.end] += valence_contribution(b.order);
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms_[i].bracket) continue;
      auto h = implicit_hydrogens(atoms[i].element, atoms[i].aromatic,
                                  bond_sum[i]);
      if (!h)
        throw Error(ErrorCode::kValence,
                    "valence exceeded on atom " + std::to_string(i));
      atoms[i].hydrogens = *h;
    }

    Molecule mol(std::move(atoms), std::move(bonds));
    if (auto problem = sanitize_problem(mol)) {
      const bool valence = problem->find("valence") != std::string::npos
                           || problem->find("hydrogen") != std::string::npos;
      throw Error(valence ? ErrorCode::kValence : ErrorCode::kParse,
                  "invalid molecule: " + *problem);
    }
    return mol;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<ParsedAtom> atoms_;
  std::vector<ParsedBond> bonds_;
  std::map<int, RingOpening> rings_;
};

// ---- canonical ranking ----------------------------------------------------

int bond_code(BondOrder o) { return static_cast<int>(o); }

// Dense ranks from per-atom signatures; returns the number of classes.
int dense_rank(const std::vector<std::vector<long long>> &sig,
               std::vector<int> &ranks) {
  const int n = static_cast<int>(sig.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return sig[a] < sig[b]; });
  int cls = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0 && sig[idx[k]] != sig[idx[k - 1]]) ++cls;
    ranks[idx[k]] = cls;
  }
  return n == 0 ? 0 : cls + 1;
}

std::vector<int> initial_ranks(const Molecule &mol) {
  const int n = mol.num_atoms();
  std::vector<std::vector<long long>> sig(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    sig[i] = {atomic_number(a.element),
              a.aromatic ? 1 : 0,
              a.charge,
              a.hydrogens,
              mol.degree(i),
              mol.atom_in_ring(i) ? 1 : 0};
  }
  std::vector<int> ranks(n);
  dense_rank(sig, ranks);
  return ranks;
}

int count_classes(const std::vector<int> &ranks) {
  int mx = -1;
  for (int r : ranks) mx = std::max(mx, r);
  return mx + 1;
}

void refine(const Molecule &mol, std::vector<int> &ranks) {
  const int n = mol.num_atoms();
  int classes = count_classes(ranks);
  std::vector<std::vector<long long>> sig(n);
  while (classes < n) {
    for (int i = 0; i < n; ++i) {
      auto &s = sig[i];
      s.clear();
      s.push_back(ranks[i]);
      std::vector<long long> nbs;
      for (const auto &nb : mol.neighbors(i))
        nbs.push_back(static_cast<long long>(ranks[nb.atom]) * 8
                      + bond_code(mol.bond(nb.bond).order));
      std::sort(nbs.begin(), nbs.end());
      s.insert(s.end(), nbs.begin(), nbs.end());
    }
    const int next = dense_rank(sig, ranks);
    if (next == classes) break;
    classes = next;
  }
}

constexpr int kMaxTieLeaves = 512;

struct CanonSearch {
  const Molecule &mol;
  std::string best;
  std::vector<int> best_ranks;
  int leaves = 0;

  void run(std::vector<int> ranks) {
    refine(mol, ranks);
    const int n = mol.num_atoms();
    if (count_classes(ranks) == n) {
      ++leaves;
      std::string s = write_smiles(mol, ranks);
      if (best_ranks.empty() || s < best) {
        best = std::move(s);
        best_ranks = ranks;
      }
      return;
    }
    // First (lowest) tied class.
    std::vector<int> count(n, 0);
    for (int r : ranks) ++count[r];
    int cell = 0;
    while (count[cell] < 2) ++cell;
    for (int a = 0; a < n; ++a) {
      if (ranks[a] != cell) continue;
      if (leaves >= kMaxTieLeaves) return;
      std::vector<int> next = ranks;
      for (int i = 0; i < n; ++i) {
        if (next[i] > cell || (next[i] == cell && i != a)) ++next[i];
      }
      run(std::move(next));
    }
  }
};

// ---- writer ---------------------------------------------------------------

void append_atom(std::string &out, const Molecule &mol, int i) {
  const Atom &a = mol.atom(i);
  std::string symbol(element_symbol(a.element));
  if (a.aromatic)
    symbol[0] = static_cast<char>(std::tolower(symbol[0]));

  if (is_organic_subset(a.element) && a.charge == 0) {
    auto implied = implicit_hydrogens(a.element, a.aromatic, mol.bond_sum(i));
    if (implied && *implied == a.hydrogens) {
      out += symbol;
      return;
    }
  }
  out += '[';
  out += symbol;
  if (a.hydrogens > 0) {
    out += 'H';
    if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  out += ']';
}

void append_bond(std::string &out, const Molecule &mol, int bond) {
  const Bond &b = mol.bond(bond);
  switch (b.order) {
  case BondOrder::kDouble:
    out += '=';
    break;
  case BondOrder::kTriple:
    out += '#';
    break;
  case BondOrder::kAromatic:
    break;
  case BondOrder::kSingle:
    if (mol.atom(b.begin).aromatic && mol.atom(b.end).aromatic) out += '-';
    break;
  }
}

void append_ring_label(std::string &out, int label) {
  if (label < 10) {
    out += static_cast<char>('0' + label);
  } else {
    out += '%';
    out += std::to_string(label);
  }
}

class SmilesWriter {
public:
  SmilesWriter(const Molecule &mol, std::span<const int> ranks)
      : mol_(mol), ranks_(ranks), visited_(mol.num_atoms(), 0),
        bond_used_(mol.num_bonds(), 0), children_(mol.num_atoms()),
        closures_(mol.num_atoms()) { }

  std::string write() {
    if (mol_.empty()) return {};
    int start = 0;
    for (int i = 1; i < mol_.num_atoms(); ++i)
      if (ranks_[i] < ranks_[start]) start = i;
    discover(start, -1);
    std::string out;
    emit(out, start, -1);
    return out;
  }

private:
  struct Closure {
    int bond;
    int partner;
    bool opens;
  };

  std::vector<Neighbor> sorted_neighbors(int u) const {
    auto nbs = mol_.neighbors(u);
    std::vector<Neighbor> v(nbs.begin(), nbs.end());
    std::sort(v.begin(), v.end(), [&](const Neighbor &a, const Neighbor &b) {
      return ranks_[a.atom] < ranks_[b.atom];
    });
    return v;
  }

  void discover(int u, int parent_bond) {
    visited_[u] = 1;
    for (const auto &nb : sorted_neighbors(u)) {
      if (nb.bond == parent_bond || bond_used_[nb.bond]) continue;
      bond_used_[nb.bond] = 1;
      if (visited_[nb.atom]) {
        // Back edge: the ring opens at the ancestor and closes here.
        closures_[nb.atom].push_back({nb.bond, u, true});
        closures_[u].push_back({nb.bond, nb.atom, false});
      } else {
        children_[u].push_back(nb);
        discover(nb.atom, nb.bond);
      }
    }
  }

  void emit(std::string &out, int u, int in_bond) {
    if (in_bond >= 0) append_bond(out, mol_, in_bond);
    append_atom(out, mol_, u);

    auto &cl = closures_[u];
    // Closing digits first (frees labels for reuse), then openings.
    for (const auto &c : cl) {
      if (c.opens) continue;
      const int label = open_label_.at(c.bond);
      append_ring_label(out, label);
      free_labels_.push_back(label);
      open_label_.erase(c.bond);
    }
    for (const auto &c : cl) {
      if (!c.opens) continue;
      const int label = take_label();
      open_label_[c.bond] = label;
      append_bond(out, mol_, c.bond);
      append_ring_label(out, label);
    }

    const auto &kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch) out += '(';
      emit(out, kids[k].atom, kids[k].bond);
      if (branch) out += ')';
    }
  }

  int take_label() {
    if (!free_labels_.empty()) {
      auto it = std::min_element(free_labels_.begin(), free_labels_.end());
      const int label = *it;
      free_labels_.erase(it);
      return label;
    }
    return ++max_label_;
  }

  const Molecule &mol_;
  std::span<const int> ranks_;
  std::vector<char> visited_;
  std::vector<char> bond_used_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Closure>> closures_;
  std::map<int, int> open_label_;
  std::vector<int> free_labels_;
  int max_label_ = 0;
};

}  // namespace

Molecule parse_smiles(std::string_view text) {
  return SmilesParser(text).parse();
}

std::string write_smiles(const Molecule &mol, std::span<const int> ranks) {
  return SmilesWriter(mol, ranks).write();
}

std::vector<int> canonical_ranks(const Molecule &mol) {
  if (mol.empty()) return {};
  CanonSearch search {mol, {}, {}, 0};
  search.run(initial_ranks(mol));
  return search.best_ranks;
}

CanonicalKey canonical_key(const Molecule &mol) {
  if (mol.empty()) return {};
  CanonSearch search {mol, {}, {}, 0};
  search.run(initial_ranks(mol));
  return {std::move(search.best)};
}

}  // namespace synroute::chem
