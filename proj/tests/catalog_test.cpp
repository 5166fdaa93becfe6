//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "synroute/catalog.h"
#include "synroute/chem/smarts.h"
#include "synroute/error.h"
#include "toy_catalog.h"

namespace synroute {
namespace {

using testing::toy_catalog;
using testing::toy_templates;

TEST(Catalog, ToyCatalogLoads) {
  LoadReport report;
  auto c = Catalog::load(testing::data_path("toy_blocks.smi"), toy_templates(), {}, &report);
  EXPECT_EQ(report.lines, 200);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(c->size(), report.parsed - report.duplicates - report.unsupported);
  EXPECT_GE(c->size(), 150);
  for (int i = 0; i < c->size(); ++i) {
    EXPECT_EQ(c->block(i).id, i);
    EXPECT_EQ(c->find(c->block(i).key), i);
  }
}

// Slot tables must equal a direct pattern scan over every block.
TEST(Catalog, SlotIndexMatchesRecompute) {
  const Catalog &c = toy_catalog();
  for (int t = 0; t < c.num_templates(); ++t) {
    const auto &tmpl = c.reaction(t);
    for (int s = 0; s < tmpl.arity(); ++s) {
      std::vector<int> expect;
      for (const auto &b : c.blocks())
        if (chem::has_match(tmpl.reactants[s], *b.mol)) expect.push_back(b.id);
      EXPECT_EQ(c.slot_blocks(t, s), expect) << tmpl.name << " slot " << s;
    }
  }
  for (const auto &b : c.blocks()) {
    ASSERT_FALSE(c.block_slots(b.id).empty());
    for (const auto &sr : c.block_slots(b.id)) {
      const auto &ids = c.slot_blocks(sr.template_index, sr.slot);
      EXPECT_TRUE(std::binary_search(ids.begin(), ids.end(), b.id));
    }
    EXPECT_EQ(c.compatible_templates(*b.mol, b.key), c.block_slots(b.id));
  }
}

TEST(Catalog, LoadingIsIdempotent) {
  auto a = Catalog::load(testing::data_path("toy_blocks.smi"), toy_templates());
  auto b = Catalog::load(testing::data_path("toy_blocks.smi"), toy_templates());
  ASSERT_EQ(a->size(), b->size());
  EXPECT_EQ(a->digest(), b->digest());
  for (int i = 0; i < a->size(); ++i) EXPECT_EQ(a->block(i).key, b->block(i).key);
}

TEST(Catalog, DeduplicatesAndReportsFailures) {
  std::vector<std::string> lines = {"# comment", "", "CC(=O)O",  "OC(C)=O extra-column",
                                    "C1CC",      "CCN",          "CCCC",     "NCC"};
  LoadReport report;
  auto c = Catalog::from_lines(lines, toy_templates(), {}, &report);
  EXPECT_EQ(report.lines, 6);
  EXPECT_EQ(report.parsed, 5);
  EXPECT_EQ(report.duplicates, 2);
  EXPECT_EQ(report.unsupported, 1);  // butane has no reactive handle
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].line, 5);
  EXPECT_EQ(c->size(), 2);

  CatalogOptions strict;
  strict.strict = true;
  try {
    Catalog::from_lines(lines, toy_templates(), strict);
    FAIL() << "strict load accepted a bad line";
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(Catalog, IndexRoundTrip) {
  const Catalog &c = toy_catalog();
  const auto dir = std::filesystem::temp_directory_path() / "synroute_catalog_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "toy.idx";
  c.save_index(path);
  EXPECT_TRUE(c.verify_index(path));

  auto other = Catalog::from_lines({"CC(=O)O", "CCN"}, toy_templates());
  EXPECT_FALSE(other->verify_index(path));

  // Corrupt one byte of the bitsets.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    char ch;
    f.seekg(-1, std::ios::end);
    f.get(ch);
    f.seekp(-1, std::ios::end);
    f.put(static_cast<char>(ch ^ 0x01));
  }
  EXPECT_FALSE(c.verify_index(path));
  EXPECT_FALSE(c.verify_index(dir / "missing.idx"));
  std::filesystem::remove_all(dir);
}

TEST(Catalog, MemoizedReactionsAgreeWithDirectApplication) {
  const Catalog &c = toy_catalog();
  const int t = c.template_index("amide_coupling");
  const auto &acids = c.slot_blocks(t, 0);
  const auto &amines = c.slot_blocks(t, 1);
  ASSERT_FALSE(acids.empty());
  ASSERT_FALSE(amines.empty());
  for (int i = 0; i < std::min<int>(5, acids.size()); ++i) {
    for (int j = 0; j < std::min<int>(5, amines.size()); ++j) {
      const Block &a = c.block(acids[i]);
      const Block &b = c.block(amines[j]);
      const chem::Molecule *mols[] = {a.mol.get(), b.mol.get()};
      auto direct = chem::apply_reaction(c.reaction(t), mols);
      auto memo1 = c.react(t, *a.mol, a.key, *b.mol, b.key);
      auto memo2 = c.react(t, *b.mol, b.key, *a.mol, a.key);
      ASSERT_EQ(direct.size(), memo1.size());
      ASSERT_EQ(direct.size(), memo2.size());
      for (std::size_t k = 0; k < direct.size(); ++k) {
        EXPECT_EQ(direct[k].key, memo1[k].key);
        EXPECT_EQ(direct[k].key, memo2[k].key);
      }
      EXPECT_FALSE(direct.empty());
    }
  }
}

TEST(Catalog, CompatibleBlocksWithPartner) {
  const Catalog &c = toy_catalog();
  const int t = c.template_index("amide_coupling");
  const Block &acid = c.block(c.slot_blocks(t, 0).front());
  auto partners = c.compatible_blocks(t, 1, *acid.mol, acid.key);
  std::set<int> expect;
  for (int id : c.slot_blocks(t, 1)) {
    const Block &b = c.block(id);
    if (!c.react(t, *acid.mol, acid.key, *b.mol, b.key).empty()) expect.insert(id);
  }
  EXPECT_EQ(std::set<int>(partners.begin(), partners.end()), expect);
  const int unary = c.template_index("boc_deprotection");
  EXPECT_THROW(c.compatible_blocks(unary, 0, *acid.mol, acid.key), Error);
  EXPECT_THROW(c.template_index("no_such_template"), Error);
}

TEST(Catalog, MissingFileIsIoError) {
  try {
    Catalog::load("/nonexistent/blocks.smi", toy_templates());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace synroute
