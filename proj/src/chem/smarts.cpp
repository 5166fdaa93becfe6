//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/smarts.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "synroute/error.h"

namespace synroute::chem {

bool AtomExpr::matches(const Molecule &mol, int atom) const {
  const Atom &a = mol.atom(atom);
  switch (op) {
  case AtomOp::kAny:
    return true;
  case AtomOp::kAtomicNumber:
    return atomic_number(a.element) == value;
  case AtomOp::kAromatic:
    return a.aromatic;
  case AtomOp::kAliphatic:
    return !a.aromatic;
  case AtomOp::kHydrogens:
    return a.hydrogens == value;
  case AtomOp::kDegree:
    return mol.degree(atom) == value;
  case AtomOp::kCharge:
    return a.charge == value;
  case AtomOp::kInRing:
    return mol.atom_in_ring(atom) == (value != 0);
  case AtomOp::kNot:
    return !children[0].matches(mol, atom);
  case AtomOp::kAnd:
    for (const auto &c : children)
      if (!c.matches(mol, atom)) return false;
    return true;
  case AtomOp::kOr:
    for (const auto &c : children)
      if (c.matches(mol, atom)) return true;
    return false;
  }
  return false;
}

bool bond_query_matches(BondQuery q, BondOrder order) {
  switch (q) {
  case BondQuery::kSingleOrAromatic:
    return order == BondOrder::kSingle || order == BondOrder::kAromatic;
  case BondQuery::kSingle:
    return order == BondOrder::kSingle;
  case BondQuery::kDouble:
    return order == BondOrder::kDouble;
  case BondQuery::kTriple:
    return order == BondOrder::kTriple;
  case BondQuery::kAromatic:
    return order == BondOrder::kAromatic;
  case BondQuery::kAny:
    return true;
  }
  return false;
}

Pattern::Pattern(std::vector<PatternAtom> atoms, std::vector<PatternBond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)),
      adjacency_(atoms_.size()) {
  for (int bi = 0; bi < num_bonds(); ++bi) {
    adjacency_[bonds_[bi].begin].push_back({bonds_[bi].end, bi});
    adjacency_[bonds_[bi].end].push_back({bonds_[bi].begin, bi});
  }
}

int Pattern::find_map(int map) const {
  for (int i = 0; i < num_atoms(); ++i)
    if (atoms_[i].map == map) return i;
  return -1;
}

std::optional<int> Pattern::find_bond(int a, int b) const {
  for (const auto &[nb, bi] : adjacency_[a])
    if (nb == b) return bi;
  return std::nullopt;
}

namespace {

AtomExpr primitive(AtomOp op, int value = 0) {
  return AtomExpr {op, value, {}};
}

AtomExpr combine(AtomOp op, std::vector<AtomExpr> parts) {
  if (parts.size() == 1) return std::move(parts[0]);
  return AtomExpr {op, 0, std::move(parts)};
}

AtomExpr element_expr(Element e, bool aromatic) {
  return combine(AtomOp::kAnd,
                 {primitive(AtomOp::kAtomicNumber, atomic_number(e)),
                  primitive(aromatic ? AtomOp::kAromatic : AtomOp::kAliphatic)});
}

void collect_spec(const AtomExpr &e, AtomSpec &spec) {
  switch (e.op) {
  case AtomOp::kAnd:
    for (const auto &c : e.children) collect_spec(c, spec);
    break;
  case AtomOp::kAtomicNumber:
    spec.element = element_from_atomic_number(e.value);
    break;
  case AtomOp::kAromatic:
    spec.aromatic = true;
    break;
  case AtomOp::kAliphatic:
    spec.aromatic = false;
    break;
  case AtomOp::kHydrogens:
    spec.hydrogens = e.value;
    break;
  case AtomOp::kCharge:
    spec.charge = e.value;
    break;
  default:
    break;
  }
}

class SmartsParser {
public:
  explicit SmartsParser(std::string_view text): s_(text) { }

  Pattern parse() {
    if (s_.empty()) throw ParseError(0, "empty SMARTS");
    int prev = -1;
    std::optional<BondQuery> pending;
    std::vector<int> branches;
    struct Open {
      int atom;
      std::optional<BondQuery> query;
      std::size_t pos;
    };
    std::map<int, Open> rings;

    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev < 0 || pending) fail("misplaced '('");
        branches.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty() || pending || s_[pos_ - 1] == '(')
          fail("misplaced ')'");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (auto q = bond_query(c)) {
        if (prev < 0 || pending) fail("misplaced bond symbol");
        pending = q;
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure without a preceding atom");
        const std::size_t start = pos_;
        int label;
        if (c == '%') {
          if (pos_ + 3 > s_.size()
              || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))
              || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
            fail("expected two digits after '%'");
          label = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
          pos_ += 3;
        } else {
          label = c - '0';
          ++pos_;
        }
        auto it = rings.find(label);
        if (it == rings.end()) {
          rings.emplace(label, Open {prev, pending, start});
        } else {
          if (it->second.atom == prev) fail("ring closure to itself");
          if (it->second.query && pending && *it->second.query != *pending)
            fail("conflicting ring-closure bond symbols");
          add_bond(it->second.atom, prev,
                   pending ? *pending
                           : it->second.query.value_or(
                               BondQuery::kSingleOrAromatic));
          rings.erase(it);
        }
        pending.reset();
      } else if (c == '.') {
        fail("'.' is not allowed inside one pattern");
      } else {
        const int idx = parse_atom();
        if (prev >= 0)
          add_bond(prev, idx, pending.value_or(BondQuery::kSingleOrAromatic));
        else if (pending)
          fail("bond symbol before the first atom");
        pending.reset();
        prev = idx;
      }
    }
    if (pending) throw ParseError(s_.size(), "dangling bond symbol");
    if (!branches.empty()) throw ParseError(s_.size(), "unclosed branch");
    if (!rings.empty())
      throw ParseError(rings.begin()->second.pos, "unclosed ring bond");

    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].map == 0) continue;
      for (std::size_t j = i + 1; j < atoms_.size(); ++j)
        if (atoms_[j].map == atoms_[i].map)
          throw ParseError(0, "duplicate atom map :" + std::to_string(atoms_[i].map));
    }
    for (auto &a : atoms_) collect_spec(a.expr, a.spec);

    Pattern p(std::move(atoms_), std::move(bonds_));
    p.set_text(std::string(s_));
    return p;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(pos_, msg);
  }

  static std::optional<BondQuery> bond_query(char c) {
    switch (c) {
    case '-':
      return BondQuery::kSingle;
    case '=':
      return BondQuery::kDouble;
    case '#':
      return BondQuery::kTriple;
    case ':':
      return BondQuery::kAromatic;
    case '~':
      return BondQuery::kAny;
    default:
      return std::nullopt;
    }
  }

  void add_bond(int a, int b, BondQuery q) {
    for (const auto &bond : bonds_)
      if ((bond.begin == a && bond.end == b) || (bond.begin == b && bond.end == a))
        fail("duplicate bond between the same atoms");
    bonds_.push_back({a, b, q});
  }

  int push(AtomExpr expr, int map = 0) {
    PatternAtom pa;
    pa.expr = std::move(expr);
    pa.map = map;
    atoms_.push_back(std::move(pa));
    return static_cast<int>(atoms_.size()) - 1;
  }

  int parse_atom() {
    const char c = s_[pos_];
    if (c == '[') return parse_bracket();
    if (c == '*') {
      ++pos_;
      return push(primitive(AtomOp::kAny));
    }
    auto two = s_.substr(pos_, 2);
    if (two == "Cl" || two == "Br") {
      pos_ += 2;
      return push(element_expr(*element_from_symbol(two), false));
    }
    if (std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      ++pos_;
      return push(element_expr(*element_from_symbol(std::string_view(&c, 1)),
                               false));
    }
    if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      ++pos_;
      const char up = static_cast<char>(std::toupper(c));
      return push(element_expr(*element_from_symbol(std::string_view(&up, 1)),
                               true));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_bracket() {
    ++pos_;
    AtomExpr expr = parse_low_and();
    int map = 0;
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        map = map * 10 + (s_[pos_++] - '0');
      if (pos_ == start) fail("expected atom-map number");
      if (map == 0) fail("atom-map number must be positive");
    }
    if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ']'");
    ++pos_;
    return push(std::move(expr), map);
  }

  bool at(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  AtomExpr parse_low_and() {
    std::vector<AtomExpr> parts {parse_or()};
    while (at(';')) {
      ++pos_;
      parts.push_back(parse_or());
    }
    return combine(AtomOp::kAnd, std::move(parts));
  }

  AtomExpr parse_or() {
    std::vector<AtomExpr> parts {parse_high_and()};
    while (at(',')) {
      ++pos_;
      parts.push_back(parse_high_and());
    }
    return combine(AtomOp::kOr, std::move(parts));
  }

  bool starts_primitive() const {
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return c == '!' || c == '#' || c == '+' || c == '-' || c == '*'
           || std::isalpha(static_cast<unsigned char>(c));
  }

  AtomExpr parse_high_and() {
    std::vector<AtomExpr> parts {parse_unary()};
    while (true) {
      if (at('&')) {
        ++pos_;
        parts.push_back(parse_unary());
      } else if (starts_primitive()) {
        parts.push_back(parse_unary());
      } else {
        break;
      }
    }
    return combine(AtomOp::kAnd, std::move(parts));
  }

  AtomExpr parse_unary() {
    if (at('!')) {
      ++pos_;
      return AtomExpr {AtomOp::kNot, 0, {parse_unary()}};
    }
    return parse_primitive();
  }

  std::optional<int> read_number() {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      return std::nullopt;
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      v = v * 10 + (s_[pos_++] - '0');
    return v;
  }

  AtomExpr parse_primitive() {
    if (pos_ >= s_.size()) fail("unexpected end of pattern");
    const char c = s_[pos_];
    switch (c) {
    case '*':
      ++pos_;
      return primitive(AtomOp::kAny);
    case '#': {
      ++pos_;
      auto z = read_number();
      if (!z) fail("expected atomic number after '#'");
      return primitive(AtomOp::kAtomicNumber, *z);
    }
    case '+':
    case '-': {
      const int sign = c == '+' ? 1 : -1;
      ++pos_;
      if (auto n = read_number()) return primitive(AtomOp::kCharge, sign * *n);
      int charge = sign;
      while (at(c)) {
        charge += sign;
        ++pos_;
      }
      return primitive(AtomOp::kCharge, charge);
    }
    case 'H': {
      ++pos_;
      return primitive(AtomOp::kHydrogens, read_number().value_or(1));
    }
    case 'D': {
      ++pos_;
      return primitive(AtomOp::kDegree, read_number().value_or(1));
    }
    case 'R': {
      ++pos_;
      auto n = read_number();
      if (n && *n != 0) fail("only R and R0 ring primitives are supported");
      return primitive(AtomOp::kInRing, n ? 0 : 1);
    }
    case 'a':
      ++pos_;
      return primitive(AtomOp::kAromatic);
    case 'A':
      ++pos_;
      return primitive(AtomOp::kAliphatic);
    default:
      break;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (pos_ + 1 < s_.size()
          && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        if (auto e = element_from_symbol(s_.substr(pos_, 2))) {
          pos_ += 2;
          return element_expr(*e, false);
        }
      }
      if (auto e = element_from_symbol(s_.substr(pos_, 1))) {
        ++pos_;
        return element_expr(*e, false);
      }
      fail("unsupported element");
    }
    if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      ++pos_;
      const char up = static_cast<char>(std::toupper(c));
      return element_expr(*element_from_symbol(std::string_view(&up, 1)), true);
    }
    fail(std::string("unexpected character '") + c + "' in atom primitive");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<PatternAtom> atoms_;
  std::vector<PatternBond> bonds_;
};

class Matcher {
public:
  Matcher(const Pattern &p, const Molecule &mol, bool first_only)
      : p_(p), mol_(mol), first_only_(first_only),
        map_(p.num_atoms(), -1), used_(mol.num_atoms(), 0) {
    // Visit order: BFS per component so each later atom has an anchored
    // neighbour whose image restricts the candidates.
    std::vector<char> seen(p.num_atoms(), 0);
    anchor_.assign(p.num_atoms(), -1);
    for (int root = 0; root < p.num_atoms(); ++root) {
      if (seen[root]) continue;
      seen[root] = 1;
      std::vector<int> queue {root};
      for (std::size_t k = 0; k < queue.size(); ++k) {
        const int u = queue[k];
        order_.push_back(u);
        for (const auto &[v, bi] : p.neighbors(u)) {
          if (seen[v]) continue;
          seen[v] = 1;
          anchor_[v] = u;
          queue.push_back(v);
        }
      }
    }
  }

  std::vector<std::vector<int>> run() {
    if (p_.num_atoms() == 0 || p_.num_atoms() > mol_.num_atoms()) return {};
    extend(0);
    std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

private:
  bool feasible(int pa, int ma) const {
    if (used_[ma] || !p_.atom(pa).expr.matches(mol_, ma)) return false;
    for (const auto &[pn, pb] : p_.neighbors(pa)) {
      const int mn = map_[pn];
      if (mn < 0) continue;
      auto mb = mol_.find_bond(ma, mn);
      if (!mb || !bond_query_matches(p_.bond(pb).query, mol_.bond(*mb).order))
        return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) {
      results_.push_back(map_);
      return first_only_;
    }
    const int pa = order_[depth];
    auto try_atom = [&](int ma) {
      if (!feasible(pa, ma)) return false;
      map_[pa] = ma;
      used_[ma] = 1;
      const bool stop = extend(depth + 1);
      used_[ma] = 0;
      map_[pa] = -1;
      return stop;
    };
    if (anchor_[pa] >= 0) {
      for (const auto &nb : mol_.neighbors(map_[anchor_[pa]]))
        if (try_atom(nb.atom)) return true;
    } else {
      for (int ma = 0; ma < mol_.num_atoms(); ++ma)
        if (try_atom(ma)) return true;
    }
    return false;
  }

  const Pattern &p_;
  const Molecule &mol_;
  bool first_only_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<char> used_;
  std::vector<std::vector<int>> results_;
};

}  // namespace

Pattern parse_smarts(std::string_view text) {
  return SmartsParser(text).parse();
}

std::vector<std::vector<int>> match_pattern(const Pattern &p,
                                            const Molecule &mol) {
  return Matcher(p, mol, false).run();
}

bool has_match(const Pattern &p, const Molecule &mol) {
  return !Matcher(p, mol, true).run().empty();
}

}  // namespace synroute::chem
