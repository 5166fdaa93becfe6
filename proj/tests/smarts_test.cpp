//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "match_oracle.h"
#include "synroute/chem/smarts.h"
#include "synroute/chem/smiles.h"
#include "synroute/error.h"

namespace synroute::chem {
namespace {

std::size_t count(const char *pattern, const char *smiles) {
  return match_pattern(parse_smarts(pattern), parse_smiles(smiles)).size();
}

TEST(Smarts, HydroxylOnEthanol) { EXPECT_EQ(count("[OH]", "CCO"), 1u); }

TEST(Smarts, AliphaticCarbonOnBenzene) {
  EXPECT_EQ(count("C", "c1ccccc1"), 0u);
  EXPECT_EQ(count("c", "c1ccccc1"), 6u);
  EXPECT_EQ(count("[#6]", "c1ccccc1"), 6u);
}

TEST(Smarts, SymmetricSingleAtom) { EXPECT_EQ(count("C", "CC"), 2u); }

TEST(Smarts, Primitives) {
  EXPECT_EQ(count("[N;H2]", "NCCN"), 2u);
  EXPECT_EQ(count("[N;H2;!a]", "Nc1ccncc1"), 1u);
  EXPECT_EQ(count("[n]", "Nc1ccncc1"), 1u);
  EXPECT_EQ(count("[Br,I]", "Brc1ccc(I)cc1"), 2u);
  EXPECT_EQ(count("[C;R]", "CC1CCC1"), 4u);
  EXPECT_EQ(count("[C;R0]", "CC1CCC1"), 1u);
  EXPECT_EQ(count("[CD3]", "CC(C)C"), 1u);
  EXPECT_EQ(count("[O-]", "CC(=O)[O-]"), 1u);
  EXPECT_EQ(count("[N+]", "C[N+](C)(C)C"), 1u);
  EXPECT_EQ(count("[!#6]", "CCO"), 1u);
  EXPECT_EQ(count("[a]", "c1ccccc1C"), 6u);
  EXPECT_EQ(count("[A]", "c1ccccc1C"), 1u);
  EXPECT_EQ(count("*", "CCO"), 3u);
  EXPECT_EQ(count("C~O", "CC=O"), 1u);
  EXPECT_EQ(count("C-O", "CC=O"), 0u);
  EXPECT_EQ(count("C=O", "CC=O"), 1u);
  EXPECT_EQ(count("c:c", "c1ccccc1"), 12u);
  EXPECT_EQ(count("C#N", "CC#N"), 1u);
}

TEST(Smarts, Precedence) {
  // ',' binds tighter than ';' and looser than '&'.
  EXPECT_EQ(count("[N,O;H1]", "CNCO"), 2u);
  EXPECT_EQ(count("[N,O&H2]", "CNCN"), 2u);
  EXPECT_EQ(count("[N,O&H2]", "CNCO"), 1u);
}

TEST(Smarts, MapsAndErrors) {
  Pattern p = parse_smarts("[C:1](=O)[OH]");
  EXPECT_EQ(p.atom(0).map, 1);
  EXPECT_EQ(p.find_map(1), 0);
  EXPECT_EQ(p.find_map(2), -1);
  EXPECT_THROW(parse_smarts("[C:1][C:1]"), ParseError);
  EXPECT_THROW(parse_smarts("C(("), ParseError);
  EXPECT_THROW(parse_smarts("C.C"), ParseError);
  EXPECT_THROW(parse_smarts("[C"), ParseError);
  EXPECT_THROW(parse_smarts("[Xx]"), ParseError);
  EXPECT_THROW(parse_smarts("C1CC"), ParseError);
}

TEST(Smarts, RingPattern) {
  EXPECT_EQ(count("c1ccccc1", "c1ccccc1"), 12u);
  EXPECT_EQ(count("C1CC1", "C1CCC1"), 0u);
}

TEST(Smarts, SortedMappings) {
  auto maps = match_pattern(parse_smarts("CO"), parse_smiles("OCCO"));
  ASSERT_EQ(maps.size(), 2u);
  EXPECT_TRUE(std::is_sorted(maps.begin(), maps.end()));
}

TEST(Smarts, AgreesWithBruteForce) {
  const char *patterns[] = {"C", "[OH]", "C=O", "[C:1](=O)[OH]", "[N;H2;+0;!a]",
                            "c1ccccc1", "[c][Br,I]", "C~C~C", "[#6]-[#7]",
                            "[C;H2][Br,I]", "[!#6;!#1]", "*~*", "[C;R]C",
                            "[a;!c]", "O=C-N"};
  const char *mols[] = {"CCO", "CC(=O)O", "CNC(C)=O", "c1ccccc1Br", "NCCN",
                        "OC(=O)c1ccncc1", "C1CCCCC1CBr", "Ic1ccc(O)cc1",
                        "CC(C)(C)OC(=O)N", "c1ccc2ccccc2c1", "C#CC=CC=O"};
  for (const char *ps : patterns) {
    Pattern p = parse_smarts(ps);
    for (const char *ms : mols) {
      SCOPED_TRACE(std::string(ps) + " on " + ms);
      Molecule m = parse_smiles(ms);
      EXPECT_EQ(match_pattern(p, m), testing::brute_force_matches(p, m));
    }
  }
}

}  // namespace
}  // namespace synroute::chem
