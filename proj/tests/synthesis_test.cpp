//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "synroute/chem/descriptors.h"
#include "synroute/chem/smiles.h"
#include "synroute/error.h"
#include "synroute/synthesis.h"
#include "toy_catalog.h"

namespace synroute {
namespace {

using testing::toy_catalog;
using testing::toy_templates;

// Products reachable from a node using apply_reaction directly.
std::set<std::string> brute_reachable(const NodePtr &n, const Catalog &c,
                                      const TreeLimits &limits,
                                      std::map<std::string, chem::MolPtr> &mols) {
  if (n->is_leaf()) {
    mols[n->key.text] = n->mol;
    return {n->key.text};
  }
  std::vector<std::set<std::string>> kids;
  for (const auto &ch : n->children) kids.push_back(brute_reachable(ch, c, limits, mols));
  std::set<std::string> out;
  auto take = [&](const std::vector<chem::Product> &ps) {
    for (const auto &p : ps) {
      if (chem::molecular_weight(*p.mol) > limits.max_weight) continue;
      out.insert(p.key.text);
      mols[p.key.text] = p.mol;
    }
  };
  const auto &t = c.reaction(n->reaction);
  if (kids.size() == 1) {
    for (const auto &a : kids[0]) {
      const chem::Molecule *m[] = {mols.at(a).get()};
      take(chem::apply_reaction(t, m));
    }
  } else {
    for (const auto &a : kids[0])
      for (const auto &b : kids[1]) {
        const chem::Molecule *m[] = {mols.at(a).get(), mols.at(b).get()};
        take(chem::apply_reaction(t, m));
      }
  }
  return out;
}

TEST(Synthesis, SampledRoutesAreValid) {
  const Catalog &c = toy_catalog();
  OpContext ctx {c, nullptr, {}, 10};
  Rng rng(7);
  std::map<int, int> depth_counts;
  for (int i = 0; i < 2000; ++i) {
    SynthesisTree t = sample_route(ctx, rng);
    auto v = validate_tree(t, c, ctx.limits);
    ASSERT_FALSE(v) << v->reason << " in " << to_sexpr(t, c);
    EXPECT_LE(t.num_internal(), ctx.limits.max_internal);
    depth_counts[t.num_internal()]++;
  }
  // The toy catalog must support multi-step routes.
  EXPECT_GT(depth_counts[0] + depth_counts[1], 0);
  int deep = 0;
  for (const auto &[k, n] : depth_counts)
    if (k >= 3) deep += n;
  EXPECT_GT(deep, 100);
}

TEST(Synthesis, ValidateRejectsTamperedTrees) {
  const Catalog &c = toy_catalog();
  OpContext ctx {c, nullptr, {}, 10};
  Rng rng(11);
  SynthesisTree t;
  do t = sample_route(ctx, rng);
  while (t.num_internal() < 2);

  // Product of the root swapped for a block: no longer produced by the reaction.
  auto root = std::make_shared<TreeNode>(*t.root());
  root->key = c.block(0).key;
  root->mol = c.block(0).mol;
  EXPECT_TRUE(validate_tree(SynthesisTree(root), c, ctx.limits));

  TreeLimits tight = ctx.limits;
  tight.max_internal = 1;
  EXPECT_TRUE(validate_tree(t, c, tight));
  tight = ctx.limits;
  tight.max_weight = 50;
  EXPECT_TRUE(validate_tree(t, c, tight));

  auto leaf = std::make_shared<TreeNode>(*make_leaf(c, 0));
  leaf->block = c.size() + 3;
  EXPECT_TRUE(validate_tree(SynthesisTree(leaf), c));
}

TEST(Synthesis, SexprAndJsonRoundTrip) {
  const Catalog &c = toy_catalog();
  OpContext ctx {c, nullptr, {}, 10};
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    SynthesisTree t = sample_route(ctx, rng);
    const std::string s = to_sexpr(t, c);
    SynthesisTree back = from_sexpr(s, c);
    EXPECT_EQ(to_sexpr(back, c), s);
    EXPECT_EQ(back.key(), t.key());
    SynthesisTree jback = from_json(to_json(t, c), c);
    EXPECT_EQ(to_sexpr(jback, c), s);
    EXPECT_FALSE(validate_tree(back, c));
  }
  EXPECT_THROW(from_sexpr("(leaf \"CCN\"", c), ParseError);
  EXPECT_THROW(from_sexpr("(rxn amide_coupling \"CC\" (leaf \"CC(=O)O\"))", c), Error);
  EXPECT_THROW(from_json(nlohmann::json::array(), c), Error);
}

TEST(Synthesis, SubtreesArePreorder) {
  const Catalog &c = toy_catalog();
  OpContext ctx {c, nullptr, {}, 10};
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    SynthesisTree t = sample_route(ctx, rng);
    auto subs = enumerate_subtrees(t);
    ASSERT_EQ(static_cast<int>(subs.size()), t.num_nodes());
    EXPECT_EQ(subs[0].key(), t.key());
    for (const auto &s : subs) EXPECT_FALSE(validate_tree(s, c));
  }
}

// Three inequivalent amines on one block give several regio-products; the
// second coupling multiplies them.
class RerunFixture : public ::testing::Test {
protected:
  void SetUp() override {
    catalog_ = Catalog::from_lines({"NCCC(N)CC(C)(C)N", "CC(=O)O", "O=C(O)c1ccccc1"},
                                   toy_templates());
    ASSERT_EQ(catalog_->size(), 3);
  }
  CatalogPtr catalog_;
};

TEST_F(RerunFixture, RerunIsUniformOverAlternates) {
  const Catalog &c = *catalog_;
  OpContext ctx {c, nullptr, {}, 10};
  const int t = c.template_index("amide_coupling");
  const int amine = *c.find(chem::canonical_key(chem::parse_smiles("NCCC(N)CC(C)(C)N")));
  const int acid = *c.find(chem::canonical_key(chem::parse_smiles("CC(=O)O")));
  const int benzoic = *c.find(chem::canonical_key(chem::parse_smiles("O=C(O)c1ccccc1")));

  auto first = detail::capped_products(ctx, t, {make_leaf(c, amine), make_leaf(c, acid)});
  ASSERT_EQ(first.size(), 3u);
  NodePtr mid = make_internal(t, first[0], {make_leaf(c, amine), make_leaf(c, acid)});
  auto second = detail::capped_products(ctx, t, {mid, make_leaf(c, benzoic)});
  ASSERT_FALSE(second.empty());
  SynthesisTree tree(make_internal(t, second[0], {mid, make_leaf(c, benzoic)}));
  ASSERT_FALSE(validate_tree(tree, c));

  std::map<std::string, chem::MolPtr> mols;
  const auto truth = brute_reachable(tree.root(), c, ctx.limits, mols);
  const auto reach = reachable_products(tree, ctx);
  ASSERT_EQ(reach.size(), truth.size());
  for (const auto &k : reach) EXPECT_TRUE(truth.count(k.text));
  ASSERT_GE(truth.size(), 4u);  // at least three alternates

  const int draws = 30000;
  std::map<std::string, int> counts;
  Rng rng(99);
  for (int i = 0; i < draws; ++i) {
    SynthesisTree r = rerun(tree, ctx, rng);
    ASSERT_NE(r.key(), tree.key());
    ASSERT_FALSE(validate_tree(r, c));
    EXPECT_EQ(r.leaves().size(), tree.leaves().size());
    EXPECT_EQ(r.reactions(), tree.reactions());
    counts[r.key().text]++;
  }
  const double expect = static_cast<double>(draws) / (truth.size() - 1);
  EXPECT_EQ(counts.size(), truth.size() - 1);
  for (const auto &[k, n] : counts) EXPECT_NEAR(n, expect, 5 * std::sqrt(expect)) << k;
}

TEST_F(RerunFixture, RerunOnLeafOrSingleProductReturnsInput) {
  const Catalog &c = *catalog_;
  OpContext ctx {c, nullptr, {}, 10};
  Rng rng(1);
  SynthesisTree leaf(make_leaf(c, 0));
  EXPECT_EQ(rerun(leaf, ctx, rng).key(), leaf.key());

  const int t = c.template_index("amide_coupling");
  auto tiny = Catalog::from_lines({"CCN", "CC(=O)O"}, toy_templates());
  OpContext tctx {*tiny, nullptr, {}, 10};
  auto prods = detail::capped_products(tctx, t, {make_leaf(*tiny, 0), make_leaf(*tiny, 1)});
  ASSERT_EQ(prods.size(), 1u);
  SynthesisTree one(make_internal(t, prods[0], {make_leaf(*tiny, 0), make_leaf(*tiny, 1)}));
  EXPECT_EQ(rerun(one, tctx, rng).key(), one.key());
}

TEST(Synthesis, GrowRespectsStepCap) {
  const Catalog &c = toy_catalog();
  TreeLimits limits;
  limits.max_internal = 2;
  OpContext ctx {c, nullptr, limits, 10};
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    SynthesisTree t = sample_route(ctx, rng, 2);
    EXPECT_LE(t.num_internal(), 2);
    if (t.num_internal() == 2) EXPECT_FALSE(grow(t, ctx, rng));
  }
}

TEST(Synthesis, FilteredSeedBlocks) {
  const Catalog &c = toy_catalog();
  BlockFilter f = BlockFilter::from_ids({1, 2, 3}, 0.0, FilterKind::kSim);
  OpContext ctx {c, &f, {}, 10};
  Rng rng(23);
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(f.contains(sample_seed_block(ctx, rng)));
}

}  // namespace
}  // namespace synroute
