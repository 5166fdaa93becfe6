//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_REACTION_H_
#define SYNROUTE_CHEM_REACTION_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synroute/chem/smarts.h"
#include "synroute/chem/smiles.h"

namespace synroute::chem {

// Unary (`P>>Q`) or binary (`P1.P2>>Q`) rewrite rule with atom maps.
struct ReactionTemplate {
  std::string name;
  std::vector<Pattern> reactants;
  Pattern product;

  int arity() const { return static_cast<int>(reactants.size()); }
};

ReactionTemplate parse_reaction(std::string_view name, std::string_view smarts);

// One `name<TAB>smarts` per line; blank lines and `#` comments are skipped.
std::vector<ReactionTemplate> load_templates(const std::filesystem::path &path);

struct Product {
  CanonicalKey key;
  MolPtr mol;
};

// All distinct sanitized products, sorted by key. Binary templates try both
// assignments of reactants to patterns and take the union. Rewrites that do
// not yield a valid molecule are dropped.
std::vector<Product> apply_reaction(const ReactionTemplate &t,
                                    std::span<const Molecule *const> reactants);

}  // namespace synroute::chem

#endif  // SYNROUTE_CHEM_REACTION_H_
