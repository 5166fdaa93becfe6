//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "synroute/chem/reaction.h"
#include "synroute/error.h"

namespace synroute::chem {
namespace {

const char *kAmide = "[C:1](=O)[OH].[N;H2:2]>>[C:1](=O)[N:2]";

std::vector<std::string> keys(const ReactionTemplate &t,
                              std::vector<std::string> smiles) {
  std::vector<Molecule> mols;
  for (const auto &s : smiles) mols.push_back(parse_smiles(s));
  std::vector<const Molecule *> ptrs;
  for (const auto &m : mols) ptrs.push_back(&m);
  std::vector<std::string> out;
  for (const auto &p : apply_reaction(t, ptrs)) {
    EXPECT_FALSE(sanitize_problem(*p.mol));
    EXPECT_EQ(canonical_key(*p.mol), p.key);
    out.push_back(p.key.text);
  }
  return out;
}

std::string key_of(const char *smi) { return canonical_key(parse_smiles(smi)).text; }

TEST(Reaction, AmideCoupling) {
  auto t = parse_reaction("amide", kAmide);
  EXPECT_EQ(t.arity(), 2);
  EXPECT_EQ(keys(t, {"CC(=O)O", "CN"}), std::vector<std::string> {key_of("CNC(C)=O")});
}

TEST(Reaction, NoMatchIsEmpty) {
  auto t = parse_reaction("amide", kAmide);
  EXPECT_TRUE(keys(t, {"CC", "CC"}).empty());
}

TEST(Reaction, OrderIndependent) {
  auto t = parse_reaction("amide", kAmide);
  EXPECT_EQ(keys(t, {"CC(=O)O", "CN"}), keys(t, {"CN", "CC(=O)O"}));
  EXPECT_EQ(keys(t, {"NCC(=O)O", "NCCC(=O)O"}), keys(t, {"NCCC(=O)O", "NCC(=O)O"}));
}

TEST(Reaction, BothAssignmentsUnioned) {
  // Each amino acid can play either role.
  auto t = parse_reaction("amide", kAmide);
  auto out = keys(t, {"NCC(=O)O", "NCCC(=O)O"});
  EXPECT_EQ(out.size(), 2u);
}

TEST(Reaction, ArityMismatch) {
  auto t = parse_reaction("amide", kAmide);
  Molecule m = parse_smiles("CC(=O)O");
  const Molecule *one[] = {&m};
  try {
    apply_reaction(t, one);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Reaction, UnaryDeprotection) {
  auto t = parse_reaction("boc", "[N:1]C(=O)OC(C)(C)C>>[N:1]");
  EXPECT_EQ(keys(t, {"CC(C)(C)OC(=O)NCCN"}), std::vector<std::string> {key_of("NCCN")});
  EXPECT_EQ(keys(t, {"CC(C)(C)OC(=O)N1CCNCC1"}),
            std::vector<std::string> {key_of("C1CNCCN1")});
}

TEST(Reaction, UnaryTwoSites) {
  auto t = parse_reaction("boc", "[N:1]C(=O)OC(C)(C)C>>[N:1]");
  auto out = keys(t, {"CC(C)(C)OC(=O)NCCCN(C)C(=O)OC(C)(C)C"});
  EXPECT_EQ(out.size(), 2u);
}

TEST(Reaction, HydrogenBookkeeping) {
  auto t = parse_reaction("redam",
                          "[C;H1:1](=O)[#6:3].[N;H2;+0;!a:2]>>[C:3][C:1][N:2]");
  EXPECT_EQ(keys(t, {"O=Cc1ccccc1", "CN"}),
            std::vector<std::string> {key_of("CNCc1ccccc1")});
  auto urea = parse_reaction(
      "urea", "[N:1]=[C:2]=[O:3].[N;H2;+0;!a:4]>>[N:1]-[C:2](=[O:3])-[N:4]");
  EXPECT_EQ(keys(urea, {"O=C=Nc1ccccc1", "CN"}),
            std::vector<std::string> {key_of("CNC(=O)Nc1ccccc1")});
  auto suzuki = parse_reaction("suzuki", "[c:1][Br,I].[c:2]B(O)O>>[c:1]-[c:2]");
  EXPECT_EQ(keys(suzuki, {"Brc1ccccc1", "OB(O)c1ccncc1"}),
            std::vector<std::string> {key_of("c1ccc(cc1)-c1ccncc1")});
}

TEST(Reaction, InvalidProductsDropped) {
  // Forming a fifth bond on a saturated carbon cannot sanitize.
  auto quaternary = parse_reaction("q", "[C;H0:1].[C;H0:2]>>[C:1][C:2]");
  EXPECT_TRUE(keys(quaternary, {"CC(C)(C)C", "CC(C)(C)C"}).empty());
}

TEST(Reaction, TemplateValidation) {
  EXPECT_THROW(parse_reaction("x", "[C:1]>>[C:2]"), Error);
  EXPECT_THROW(parse_reaction("x", "[C:1].[C:1]>>[C:1]"), Error);
  EXPECT_THROW(parse_reaction("x", "[C:1]"), ParseError);
  EXPECT_THROW(parse_reaction("x", "C.C.C>>C"), ParseError);
  EXPECT_THROW(parse_reaction("x", "[C:1]>>[C:1].C"), ParseError);
  EXPECT_THROW(parse_reaction("x", "[C:1]>>[C:1]*"), Error);
}

TEST(Reaction, RepositoryTemplatesLoad) {
  auto templates = load_templates(SYNROUTE_DATA_DIR "/templates.tsv");
  EXPECT_GE(templates.size(), 10u);
}

}  // namespace
}  // namespace synroute::chem
