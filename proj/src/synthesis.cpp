//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/synthesis.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>

#include "synroute/chem/descriptors.h"
#include "synroute/error.h"

namespace synroute {

NodePtr make_leaf(const Catalog &catalog, int block_id) {
  const Block &b = catalog.block(block_id);
  auto node = std::make_shared<TreeNode>();
  node->block = block_id;
  node->mol = b.mol;
  node->key = b.key;
  node->weight = b.weight;
  return node;
}

NodePtr make_internal(int reaction, const chem::Product &product,
                      std::vector<NodePtr> children) {
  auto node = std::make_shared<TreeNode>();
  node->reaction = reaction;
  node->mol = product.mol;
  node->key = product.key;
  node->weight = chem::molecular_weight(*product.mol);
  node->internal_count = 1;
  for (const auto &c : children) {
    node->internal_count += c->internal_count;
    node->node_count += c->node_count;
  }
  node->children = std::move(children);
  return node;
}

namespace {

void preorder(const NodePtr &n, const std::function<void(const NodePtr &)> &visit) {
  visit(n);
  for (const auto &c : n->children) preorder(c, visit);
}

std::vector<chem::Product> capped(const OpContext &ctx, int t,
                                  std::span<const chem::Molecule *const> mols,
                                  std::span<const chem::CanonicalKey *const> keys) {
  std::vector<chem::Product> all =
      mols.size() == 1
          ? ctx.catalog.react(t, *mols[0], *keys[0])
          : ctx.catalog.react(t, *mols[0], *keys[0], *mols[1], *keys[1]);
  std::vector<chem::Product> out;
  for (auto &p : all)
    if (chem::molecular_weight(*p.mol) <= ctx.limits.max_weight) out.push_back(std::move(p));
  return out;
}

}  // namespace

std::vector<int> SynthesisTree::leaves() const {
  std::vector<int> out;
  preorder(root_, [&](const NodePtr &n) {
    if (n->is_leaf()) out.push_back(n->block);
  });
  return out;
}

std::vector<int> SynthesisTree::reactions() const {
  std::vector<int> out;
  preorder(root_, [&](const NodePtr &n) {
    if (!n->is_leaf()) out.push_back(n->reaction);
  });
  return out;
}

std::optional<Violation> validate_tree(const SynthesisTree &tree, const Catalog &catalog,
                                       const TreeLimits &limits) {
  if (tree.empty()) return Violation {0, "empty tree"};
  std::optional<Violation> found;
  int index = 0;
  std::function<void(const NodePtr &)> visit = [&](const NodePtr &n) {
    const int me = index++;
    if (found) return;
    auto fail = [&](std::string why) { found = Violation {me, std::move(why)}; };
    if (n->weight > limits.max_weight) return fail("weight above cap");
    if (n->is_leaf()) {
      if (!n->children.empty()) return fail("leaf with children");
      if (n->block < 0 || n->block >= catalog.size())
        return fail("leaf block not in catalog");
      if (catalog.block(n->block).key != n->key)
        return fail("leaf molecule differs from catalog block");
    } else {
      if (n->reaction >= catalog.num_templates())
        return fail("unknown template");
      const auto &t = catalog.reaction(n->reaction);
      if (static_cast<int>(n->children.size()) != t.arity())
        return fail("child count differs from template arity");
      std::vector<chem::Product> products =
          t.arity() == 1 ? catalog.react(n->reaction, *n->children[0]->mol,
                                         n->children[0]->key)
                         : catalog.react(n->reaction, *n->children[0]->mol,
                                         n->children[0]->key, *n->children[1]->mol,
                                         n->children[1]->key);
      const bool ok = std::any_of(products.begin(), products.end(),
                                  [&](const chem::Product &p) { return p.key == n->key; });
      if (!ok) return fail("stored product not produced by " + t.name);
    }
    for (const auto &c : n->children) visit(c);
  };
  visit(tree.root());
  if (found) return found;
  if (tree.num_internal() > limits.max_internal)
    return Violation {0, "more reaction steps than allowed"};
  return std::nullopt;
}

std::vector<SynthesisTree> enumerate_subtrees(const SynthesisTree &tree) {
  std::vector<SynthesisTree> out;
  preorder(tree.root(), [&](const NodePtr &n) { out.emplace_back(n); });
  return out;
}

int sample_seed_block(const OpContext &ctx, Rng &rng) {
  if (ctx.catalog.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "empty building-block catalog");
  std::vector<int> all(ctx.catalog.size());
  std::iota(all.begin(), all.end(), 0);
  return sample_filtered(all, ctx.filter, rng)->id;
}

namespace detail {

std::vector<chem::Product> capped_products(const OpContext &ctx, int t,
                                           const std::vector<NodePtr> &children) {
  std::vector<const chem::Molecule *> mols;
  std::vector<const chem::CanonicalKey *> keys;
  for (const auto &c : children) {
    mols.push_back(c->mol.get());
    keys.push_back(&c->key);
  }
  return capped(ctx, t, mols, keys);
}

}  // namespace detail

std::optional<SynthesisTree> grow(const SynthesisTree &tree, const OpContext &ctx,
                                  Rng &rng) {
  if (tree.num_internal() >= ctx.limits.max_internal) return std::nullopt;
  const NodePtr &root = tree.root();
  auto slots = ctx.catalog.compatible_templates(*root->mol, root->key);
  if (slots.empty()) return std::nullopt;
  const SlotRef sr = slots[uniform_index(rng, slots.size())];
  const int t = sr.template_index;

  if (ctx.catalog.reaction(t).arity() == 1) {
    auto products = detail::capped_products(ctx, t, {root});
    if (products.empty()) return std::nullopt;
    const auto &p = products[uniform_index(rng, products.size())];
    return SynthesisTree(make_internal(t, p, {root}));
  }

  const auto &space = ctx.catalog.slot_blocks(t, 1 - sr.slot);
  auto accept = [&](int id) {
    const Block &b = ctx.catalog.block(id);
    const chem::Molecule *mols[] = {root->mol.get(), b.mol.get()};
    const chem::CanonicalKey *keys[] = {&root->key, &b.key};
    return !capped(ctx, t, mols, keys).empty();
  };
  auto draw = sample_filtered(space, ctx.filter, rng, accept);
  if (!draw) return std::nullopt;
  NodePtr leaf = make_leaf(ctx.catalog, draw->id);
  std::vector<NodePtr> children {root, leaf};
  auto products = detail::capped_products(ctx, t, children);
  const auto &p = products[uniform_index(rng, products.size())];
  return SynthesisTree(make_internal(t, p, std::move(children)));
}

SynthesisTree sample_route(const OpContext &ctx, Rng &rng, int max_steps) {
  SynthesisTree tree(make_leaf(ctx.catalog, sample_seed_block(ctx, rng)));
  if (max_steps <= 0) return tree;
  const int steps = static_cast<int>(uniform_int(rng, 1, max_steps));
  for (int s = 0; s < steps; ++s) {
    bool grown = false;
    for (int attempt = 0; attempt < ctx.retries && !grown; ++attempt) {
      if (auto next = grow(tree, ctx, rng)) {
        tree = std::move(*next);
        grown = true;
      }
    }
    if (!grown) break;
  }
  return tree;
}

namespace {

// Upper bound on distinct products tracked per node while propagating
// alternates; keeps pathological multi-site templates bounded.
constexpr std::size_t kMaxAlternates = 256;

struct Alternate {
  chem::Product product;
  std::vector<int> child_choice;
};

class Reassigner {
public:
  explicit Reassigner(const OpContext &ctx): ctx_(ctx) { }

  const std::vector<Alternate> &alternates(const NodePtr &n) {
    auto it = memo_.find(n.get());
    if (it != memo_.end()) return it->second;
    std::vector<Alternate> out;
    if (n->is_leaf()) {
      out.push_back({chem::Product {n->key, n->mol}, {}});
    } else {
      std::map<chem::CanonicalKey, int> seen;
      auto add = [&](std::vector<chem::Product> prods, std::vector<int> choice) {
        for (auto &p : prods) {
          if (out.size() >= kMaxAlternates) return;
          if (seen.count(p.key)) continue;
          seen.emplace(p.key, static_cast<int>(out.size()));
          out.push_back({std::move(p), choice});
        }
      };
      const auto &a = alternates(n->children[0]);
      if (n->children.size() == 1) {
        for (std::size_t i = 0; i < a.size(); ++i) {
          const chem::Molecule *mols[] = {a[i].product.mol.get()};
          const chem::CanonicalKey *keys[] = {&a[i].product.key};
          add(capped(ctx_, n->reaction, mols, keys), {static_cast<int>(i)});
        }
      } else {
        const auto &b = alternates(n->children[1]);
        for (std::size_t i = 0; i < a.size(); ++i) {
          for (std::size_t j = 0; j < b.size(); ++j) {
            const chem::Molecule *mols[] = {a[i].product.mol.get(),
                                            b[j].product.mol.get()};
            const chem::CanonicalKey *keys[] = {&a[i].product.key, &b[j].product.key};
            add(capped(ctx_, n->reaction, mols, keys),
                {static_cast<int>(i), static_cast<int>(j)});
          }
        }
      }
    }
    return memo_.emplace(n.get(), std::move(out)).first->second;
  }

  NodePtr build(const NodePtr &n, int choice) {
    if (n->is_leaf()) return n;
    const Alternate &alt = alternates(n)[choice];
    std::vector<NodePtr> children;
    for (std::size_t c = 0; c < n->children.size(); ++c)
      children.push_back(build(n->children[c], alt.child_choice[c]));
    return make_internal(n->reaction, alt.product, std::move(children));
  }

private:
  const OpContext &ctx_;
  std::map<const TreeNode *, std::vector<Alternate>> memo_;
};

}  // namespace

namespace detail {

std::optional<SynthesisTree> reassign(const SynthesisTree &structure,
                                      const OpContext &ctx, Rng &rng,
                                      const chem::CanonicalKey *exclude) {
  Reassigner r(ctx);
  const auto &root_alts = r.alternates(structure.root());
  // Reservoir selection over the stream of admissible root products.
  int chosen = -1;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < root_alts.size(); ++i) {
    if (exclude && root_alts[i].product.key == *exclude) continue;
    ++seen;
    if (uniform_index(rng, seen) == 0) chosen = static_cast<int>(i);
  }
  if (chosen < 0) return std::nullopt;
  return SynthesisTree(r.build(structure.root(), chosen));
}

}  // namespace detail

SynthesisTree rerun(const SynthesisTree &tree, const OpContext &ctx, Rng &rng) {
  if (tree.root()->is_leaf()) return tree;
  auto out = detail::reassign(tree, ctx, rng, &tree.key());
  return out ? *out : tree;
}

std::vector<chem::CanonicalKey> reachable_products(const SynthesisTree &tree,
                                                   const OpContext &ctx) {
  Reassigner r(ctx);
  std::vector<chem::CanonicalKey> out;
  for (const auto &a : r.alternates(tree.root())) out.push_back(a.product.key);
  std::sort(out.begin(), out.end());
  return out;
}

// ---- serialization --------------------------------------------------------

namespace {

std::string quote(const std::string &s) { return "\"" + s + "\""; }

std::string sexpr(const NodePtr &n, const Catalog &catalog) {
  if (n->is_leaf()) return "(leaf " + quote(n->key.text) + ")";
  std::vector<std::string> kids;
  for (const auto &c : n->children) kids.push_back(sexpr(c, catalog));
  std::sort(kids.begin(), kids.end());
  std::string out = "(rxn " + catalog.reaction(n->reaction).name + " " + quote(n->key.text);
  for (const auto &k : kids) out += " " + k;
  return out + ")";
}

NodePtr replay_internal(const Catalog &catalog, int t, const std::string &product_key,
                        std::vector<NodePtr> children) {
  const auto &tmpl = catalog.reaction(t);
  if (static_cast<int>(children.size()) != tmpl.arity())
    throw Error(ErrorCode::kInvalidArgument,
                "template " + tmpl.name + " needs " + std::to_string(tmpl.arity())
                    + " children");
  std::vector<chem::Product> products =
      tmpl.arity() == 1
          ? catalog.react(t, *children[0]->mol, children[0]->key)
          : catalog.react(t, *children[0]->mol, children[0]->key, *children[1]->mol,
                          children[1]->key);
  for (const auto &p : products)
    if (p.key.text == product_key) return make_internal(t, p, std::move(children));
  throw Error(ErrorCode::kInvalidArgument,
              "product " + product_key + " is not produced by " + tmpl.name);
}

NodePtr leaf_for_key(const Catalog &catalog, const std::string &key) {
  auto id = catalog.find(chem::CanonicalKey {key});
  if (!id) throw Error(ErrorCode::kNotFound, "block " + key + " not in catalog");
  return make_leaf(catalog, *id);
}

class SexprReader {
public:
  SexprReader(std::string_view s, const Catalog &catalog): s_(s), catalog_(catalog) { }

  NodePtr read() {
    NodePtr n = node();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return n;
  }

private:
  [[noreturn]] void fail(const std::string &msg) { throw ParseError(pos_, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string symbol() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))
           && s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != '"')
      ++pos_;
    if (pos_ == start) fail("expected symbol");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string string() {
    expect('"');
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
    if (pos_ >= s_.size()) fail("unterminated string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  NodePtr node() {
    expect('(');
    const std::string head = symbol();
    if (head == "leaf") {
      std::string key = string();
      expect(')');
      return leaf_for_key(catalog_, key);
    }
    if (head != "rxn") fail("expected 'leaf' or 'rxn'");
    const int t = catalog_.template_index(symbol());
    const std::string product = string();
    std::vector<NodePtr> children;
    skip();
    while (pos_ < s_.size() && s_[pos_] == '(') {
      children.push_back(node());
      skip();
    }
    expect(')');
    return replay_internal(catalog_, t, product, std::move(children));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const Catalog &catalog_;
};

nlohmann::json node_json(const NodePtr &n, const Catalog &catalog) {
  if (n->is_leaf()) return {{"block", n->block}, {"smiles", n->key.text}};
  nlohmann::json kids = nlohmann::json::array();
  std::vector<std::pair<std::string, nlohmann::json>> sorted;
  for (const auto &c : n->children) sorted.push_back({sexpr(c, catalog), node_json(c, catalog)});
  std::sort(sorted.begin(), sorted.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  for (auto &[k, j] : sorted) kids.push_back(std::move(j));
  return {{"template", catalog.reaction(n->reaction).name},
          {"product", n->key.text},
          {"children", std::move(kids)}};
}

NodePtr node_from_json(const nlohmann::json &j, const Catalog &catalog) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "tree node must be an object");
  if (j.contains("smiles") && !j.contains("template"))
    return leaf_for_key(catalog, j.at("smiles").get<std::string>());
  const int t = catalog.template_index(j.at("template").get<std::string>());
  std::vector<NodePtr> children;
  for (const auto &c : j.at("children")) children.push_back(node_from_json(c, catalog));
  return replay_internal(catalog, t, j.at("product").get<std::string>(), std::move(children));
}

}  // namespace

std::string to_sexpr(const SynthesisTree &tree, const Catalog &catalog) {
  return sexpr(tree.root(), catalog);
}

SynthesisTree from_sexpr(std::string_view text, const Catalog &catalog) {
  return SynthesisTree(SexprReader(text, catalog).read());
}

nlohmann::json to_json(const SynthesisTree &tree, const Catalog &catalog) {
  return node_json(tree.root(), catalog);
}

SynthesisTree from_json(const nlohmann::json &j, const Catalog &catalog) {
  try {
    return SynthesisTree(node_from_json(j, catalog));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed tree JSON: ") + e.what());
  }
}

}  // namespace synroute
