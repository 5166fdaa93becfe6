//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CHEM_DESCRIPTORS_H_
#define SYNROUTE_CHEM_DESCRIPTORS_H_

#include <map>
#include <string>

#include "synroute/chem/molecule.h"

namespace synroute::chem {

// Ring systems plus linkers after repeatedly stripping terminal non-ring
// atoms. Acyclic molecules give an empty graph.
Molecule murcko_scaffold(const Molecule &mol);

// Average molecular mass including hydrogens, in Da.
double molecular_weight(const Molecule &mol);

// Element symbol -> count, hydrogens included under "H".
std::map<std::string, int> formula_counts(const Molecule &mol);

// Parses "C7H8"-style formulas. Throws ParseError.
std::map<std::string, int> parse_formula(std::string_view text);

}  // namespace synroute::chem

#endif  // SYNROUTE_CHEM_DESCRIPTORS_H_
