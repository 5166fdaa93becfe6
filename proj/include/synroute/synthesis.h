//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_SYNTHESIS_H_
#define SYNROUTE_SYNTHESIS_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "synroute/catalog.h"
#include "synroute/filter.h"
#include "synroute/random.h"

namespace synroute {

struct TreeLimits {
  int max_internal = 5;
  double max_weight = 1000.0;
};

struct TreeNode;
using NodePtr = std::shared_ptr<const TreeNode>;

// Leaves hold a block id; internal nodes hold a template index and the
// product chosen for them. Children are unordered (1 or 2).
struct TreeNode {
  int block = -1;
  int reaction = -1;
  chem::MolPtr mol;
  chem::CanonicalKey key;
  double weight = 0.0;
  std::vector<NodePtr> children;
  int internal_count = 0;  // internal nodes in this subtree
  int node_count = 1;

  bool is_leaf() const { return reaction < 0; }
};

NodePtr make_leaf(const Catalog &catalog, int block_id);
NodePtr make_internal(int reaction, const chem::Product &product,
                      std::vector<NodePtr> children);

// Immutable value wrapper around a root node.
class SynthesisTree {
public:
  SynthesisTree() = default;
  explicit SynthesisTree(NodePtr root): root_(std::move(root)) { }

  const NodePtr &root() const { return root_; }
  bool empty() const { return !root_; }
  const chem::CanonicalKey &key() const { return root_->key; }
  const chem::Molecule &product() const { return *root_->mol; }
  int num_internal() const { return root_->internal_count; }
  int num_nodes() const { return root_->node_count; }

  // Leaf block ids (multiset, preorder).
  std::vector<int> leaves() const;
  // Template indices of internal nodes (preorder).
  std::vector<int> reactions() const;

private:
  NodePtr root_;
};

struct Violation {
  int node = 0;  // preorder index
  std::string reason;
};

// Replays every internal node and checks leaf membership and caps. Returns
// the first violation in preorder, or nullopt for a valid tree.
std::optional<Violation> validate_tree(const SynthesisTree &tree,
                                       const Catalog &catalog,
                                       const TreeLimits &limits = {});

// One subtree per node, preorder.
std::vector<SynthesisTree> enumerate_subtrees(const SynthesisTree &tree);

// Context shared by the tree operators.
struct OpContext {
  const Catalog &catalog;
  const BlockFilter *filter = nullptr;
  TreeLimits limits;
  int retries = 10;
};

// Picks a leaf block (filter-aware) for route starts.
int sample_seed_block(const OpContext &ctx, Rng &rng);

// Applies one compatible reaction at the root; binary reactions take a
// filter-aware compatible block. Single attempt.
std::optional<SynthesisTree> grow(const SynthesisTree &tree, const OpContext &ctx,
                                  Rng &rng);

// Random block, then Grow k ~ Uniform{1..max_steps} times with `retries`
// attempts per step; a step that exhausts its retries ends the route.
SynthesisTree sample_route(const OpContext &ctx, Rng &rng, int max_steps = 5);

// Keeps blocks and templates, reassigns intermediates so that the root
// product differs from the current one; uniform over the distinct alternate
// root products. Returns the input when there is no alternate.
SynthesisTree rerun(const SynthesisTree &tree, const OpContext &ctx, Rng &rng);

// Distinct root products reachable with the tree's fixed blocks/templates.
std::vector<chem::CanonicalKey> reachable_products(const SynthesisTree &tree,
                                                   const OpContext &ctx);

// Canonical s-expression, e.g.
//   (rxn amide_coupling "CNC(C)=O" (leaf "CC(=O)O") (leaf "CN"))
// Children are ordered by their own text so equal trees print identically.
std::string to_sexpr(const SynthesisTree &tree, const Catalog &catalog);
SynthesisTree from_sexpr(std::string_view text, const Catalog &catalog);

nlohmann::json to_json(const SynthesisTree &tree, const Catalog &catalog);
SynthesisTree from_json(const nlohmann::json &j, const Catalog &catalog);

// Helpers shared with the genetic operators.
namespace detail {

// Products of `t` on the given child products that satisfy the weight cap.
std::vector<chem::Product> capped_products(const OpContext &ctx, int t,
                                           const std::vector<NodePtr> &children);

// Rebuilds `structure` (same shape, blocks, templates) choosing intermediate
// products so that the root product is uniform over reachable products other
// than `exclude`. nullopt when none exists.
std::optional<SynthesisTree> reassign(const SynthesisTree &structure,
                                      const OpContext &ctx, Rng &rng,
                                      const chem::CanonicalKey *exclude);

}  // namespace detail

}  // namespace synroute

#endif  // SYNROUTE_SYNTHESIS_H_
