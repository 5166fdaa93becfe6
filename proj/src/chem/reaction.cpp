//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/reaction.h"

#include <fstream>
#include <map>
#include <set>

#include "synroute/error.h"

namespace synroute::chem {
namespace {

std::optional<BondOrder> concrete_order(BondQuery q) {
  switch (q) {
  case BondQuery::kSingle:
    return BondOrder::kSingle;
  case BondQuery::kDouble:
    return BondOrder::kDouble;
  case BondQuery::kTriple:
    return BondOrder::kTriple;
  case BondQuery::kAromatic:
    return BondOrder::kAromatic;
  default:
    return std::nullopt;
  }
}

std::pair<int, int> ordered(int a, int b) {
  return a < b ? std::pair {a, b} : std::pair {b, a};
}

// Applies one match combination. Returns nullopt when the rewrite does not
// produce a valid molecule.
std::optional<Molecule> rewrite(const ReactionTemplate &t,
                                std::span<const Molecule *const> mols,
                                std::span<const std::vector<int> *const> maps) {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<int> offset;
  for (const Molecule *m : mols) {
    offset.push_back(static_cast<int>(atoms.size()));
    for (const auto &a : m->atoms()) atoms.push_back(a);
    for (const auto &b : m->bonds())
      bonds.push_back({b.begin + offset.back(), b.end + offset.back(), b.order});
  }
  const int n_old = static_cast<int>(atoms.size());

  std::vector<int> old_bond_sum(n_old, 0);
  for (const auto &b : bonds) {
    old_bond_sum[b.begin] += valence_contribution(b.order);
    old_bond_sum[b.end] += valence_contribution(b.order);
  }

  std::map<int, int> by_map;  // map number -> combined atom
  std::vector<char> matched(n_old, 0), deleted(n_old, 0);
  std::set<std::pair<int, int>> pattern_bonds;
  for (std::size_t k = 0; k < mols.size(); ++k) {
    const Pattern &p = t.reactants[k];
    const auto &m = *maps[k];
    for (int i = 0; i < p.num_atoms(); ++i) {
      const int ca = offset[k] + m[i];
      matched[ca] = 1;
      const int map = p.atom(i).map;
      if (map != 0 && t.product.find_map(map) >= 0) by_map[map] = ca;
      else deleted[ca] = 1;
    }
    for (const auto &pb : p.bonds())
      pattern_bonds.insert(ordered(offset[k] + m[pb.begin], offset[k] + m[pb.end]));
  }

  std::map<std::pair<int, int>, BondOrder> remembered;
  std::map<std::pair<int, int>, BondOrder> kept;
  for (const auto &b : bonds) {
    const auto key = ordered(b.begin, b.end);
    if (pattern_bonds.count(key)) {
      remembered[key] = b.order;
      continue;
    }
    if (deleted[b.begin] || deleted[b.end]) continue;
    kept[key] = b.order;
  }

  // Product atoms: mapped ones reuse their source atom, others are appended.
  const Pattern &q = t.product;
  std::vector<int> product_atom(q.num_atoms());
  for (int j = 0; j < q.num_atoms(); ++j) {
    const PatternAtom &pa = q.atom(j);
    if (pa.map != 0) {
      product_atom[j] = by_map.at(pa.map);
      continue;
    }
    Atom a;
    a.element = *pa.spec.element;
    a.aromatic = pa.spec.aromatic.value_or(false);
    a.charge = pa.spec.charge.value_or(0);
    product_atom[j] = static_cast<int>(atoms.size());
    atoms.push_back(a);
  }
  for (const auto &pb : q.bonds()) {
    const int a = product_atom[pb.begin];
    const int b = product_atom[pb.end];
    const auto key = ordered(a, b);
    BondOrder order = BondOrder::kSingle;
    if (auto c = concrete_order(pb.query)) order = *c;
    else if (auto it = remembered.find(key); it != remembered.end())
      order = it->second;
    kept[key] = order;
  }

  const int n_all = static_cast<int>(atoms.size());
  std::vector<int> new_bond_sum(n_all, 0);
  for (const auto &[key, order] : kept) {
    new_bond_sum[key.first] += valence_contribution(order);
    new_bond_sum[key.second] += valence_contribution(order);
  }
  for (int j = 0; j < q.num_atoms(); ++j) {
    const PatternAtom &pa = q.atom(j);
    Atom &a = atoms[product_atom[j]];
    const int idx = product_atom[j];
    if (pa.spec.charge) a.charge = *pa.spec.charge;
    if (pa.spec.hydrogens) {
      a.hydrogens = *pa.spec.hydrogens;
    } else if (pa.map != 0) {
      a.hydrogens += old_bond_sum[idx] - new_bond_sum[idx];
    } else {
      auto h = implicit_hydrogens(a.element, a.aromatic, new_bond_sum[idx]);
      if (!h) return std::nullopt;
      a.hydrogens = a.charge == 0 ? *h : 0;
    }
  }

  // Keep the connected component holding the product pattern atoms.
  std::vector<std::vector<int>> adj(n_all);
  for (const auto &[key, order] : kept) {
    adj[key.first].push_back(key.second);
    adj[key.second].push_back(key.first);
  }
  std::vector<char> reach(n_all, 0);
  std::vector<int> stack {product_atom.empty() ? 0 : product_atom[0]};
  reach[stack[0]] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (reach[v] || (v < n_old && deleted[v])) continue;
      reach[v] = 1;
      stack.push_back(v);
    }
  }
  for (int pa : product_atom)
    if (!reach[pa]) return std::nullopt;

  std::vector<int> new_index(n_all, -1);
  std::vector<Atom> out_atoms;
  for (int i = 0; i < n_all; ++i) {
    if (!reach[i]) continue;
    new_index[i] = static_cast<int>(out_atoms.size());
    out_atoms.push_back(atoms[i]);
  }
  std::vector<Bond> out_bonds;
  for (const auto &[key, order] : kept) {
    if (!reach[key.first] || !reach[key.second]) continue;
    out_bonds.push_back({new_index[key.first], new_index[key.second], order});
  }
  Molecule product(std::move(out_atoms), std::move(out_bonds));
  if (sanitize_problem(product)) return std::nullopt;
  return product;
}

}  // namespace

ReactionTemplate parse_reaction(std::string_view name, std::string_view smarts) {
  const auto arrow = smarts.find(">>");
  if (arrow == std::string_view::npos)
    throw ParseError(0, "reaction SMARTS needs '>>'");
  if (smarts.find(">>", arrow + 2) != std::string_view::npos
      || smarts.find('>', arrow + 2) != std::string_view::npos)
    throw ParseError(arrow + 2, "more than one '>>'");

  ReactionTemplate t;
  t.name = std::string(name);
  std::string_view lhs = smarts.substr(0, arrow);
  std::string_view rhs = smarts.substr(arrow + 2);

  std::size_t start = 0;
  while (true) {
    const auto dot = lhs.find('.', start);
    const auto part = lhs.substr(start, dot == std::string_view::npos
                                            ? std::string_view::npos
                                            : dot - start);
    try {
      t.reactants.push_back(parse_smarts(part));
    } catch (const ParseError &e) {
      throw ParseError(start + e.position(), "in reactant pattern");
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (t.reactants.size() > 2)
    throw ParseError(0, "at most two reactant patterns are supported");
  if (rhs.find('.') != std::string_view::npos)
    throw ParseError(arrow + 2, "product must be a single pattern");
  try {
    t.product = parse_smarts(rhs);
  } catch (const ParseError &e) {
    throw ParseError(arrow + 2 + e.position(), "in product pattern");
  }

  std::map<int, int> seen;
  for (const auto &p : t.reactants) {
    for (const auto &a : p.atoms()) {
      if (a.map == 0) continue;
      if (seen.count(a.map))
        throw Error(ErrorCode::kParse,
                    "atom map :" + std::to_string(a.map)
                        + " appears in two reactant patterns");
      seen[a.map] = 1;
    }
  }
  for (const auto &a : t.product.atoms()) {
    if (a.map != 0 && !seen.count(a.map))
      throw Error(ErrorCode::kParse, "product atom map :" + std::to_string(a.map)
                                         + " not present in any reactant");
    if (a.map == 0 && !a.spec.element)
      throw Error(ErrorCode::kParse,
                  "unmapped product atoms must name an element");
  }
  return t;
}

std::vector<ReactionTemplate> load_templates(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open template file " + path.string());
  std::vector<ReactionTemplate> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno)
                                         + ": expected name<TAB>smarts");
    try {
      out.push_back(parse_reaction(line.substr(0, tab), line.substr(tab + 1)));
    } catch (const Error &e) {
      throw Error(ErrorCode::kParse,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    for (std::size_t k = 0; k + 1 < out.size(); ++k)
      if (out[k].name == out.back().name)
        throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno)
                                           + ": duplicate template name "
                                           + out.back().name);
  }
  return out;
}

std::vector<Product> apply_reaction(const ReactionTemplate &t,
                                    std::span<const Molecule *const> reactants) {
  if (static_cast<int>(reactants.size()) != t.arity())
    throw Error(ErrorCode::kInvalidArgument,
                "template " + t.name + " expects " + std::to_string(t.arity())
                    + " reactant(s), got " + std::to_string(reactants.size()));

  std::map<CanonicalKey, MolPtr> found;
  auto emit = [&](std::span<const Molecule *const> mols,
                  std::span<const std::vector<int> *const> maps) {
    auto mol = rewrite(t, mols, maps);
    if (!mol) return;
    CanonicalKey key = canonical_key(*mol);
    if (found.count(key)) return;
    found.emplace(std::move(key), std::make_shared<const Molecule>(std::move(*mol)));
  };

  if (t.arity() == 1) {
    for (const auto &m : match_pattern(t.reactants[0], *reactants[0])) {
      const std::vector<int> *maps[] = {&m};
      emit(reactants, maps);
    }
  } else {
    const int orders[2][2] = {{0, 1}, {1, 0}};
    for (const auto &o : orders) {
      const Molecule *mols[] = {reactants[o[0]], reactants[o[1]]};
      auto first = match_pattern(t.reactants[0], *mols[0]);
      if (first.empty()) continue;
      auto second = match_pattern(t.reactants[1], *mols[1]);
      for (const auto &m0 : first) {
        for (const auto &m1 : second) {
          const std::vector<int> *maps[] = {&m0, &m1};
          emit(mols, maps);
        }
      }
    }
  }

  std::vector<Product> out;
  out.reserve(found.size());
  for (auto &[key, mol] : found) out.push_back({key, mol});
  return out;
}

}  // namespace synroute::chem
