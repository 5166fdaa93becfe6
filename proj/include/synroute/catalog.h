//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_CATALOG_H_
#define SYNROUTE_CATALOG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "synroute/chem/fingerprint.h"
#include "synroute/chem/reaction.h"
#include "synroute/lru.h"

namespace synroute {

struct Block {
  int id = 0;
  chem::MolPtr mol;
  chem::CanonicalKey key;
  chem::CountFingerprint fp;
  double weight = 0.0;
};

struct SlotRef {
  int template_index = 0;
  int slot = 0;

  friend bool operator==(const SlotRef &, const SlotRef &) = default;
};

struct LoadFailure {
  int line = 0;
  std::string text;
  std::string message;
};

struct LoadReport {
  int lines = 0;        // non-comment, non-blank lines
  int parsed = 0;
  int duplicates = 0;
  int unsupported = 0;  // matched no reactant pattern
  std::vector<LoadFailure> failures;
};

struct CatalogOptions {
  bool strict = false;
  int fingerprint_dim = chem::kModelFingerprintDim;
  std::size_t memo_capacity = 100000;
};

// Building blocks plus the reaction templates they are used with. Block and
// slot tables are fixed after construction; reaction and compatibility
// queries are memoized in internally synchronized LRU caches, so a shared
// Catalog may be queried from several threads.
class Catalog {
public:
  static std::shared_ptr<const Catalog> load(
      const std::filesystem::path &blocks_path,
      std::vector<chem::ReactionTemplate> templates,
      const CatalogOptions &options = {}, LoadReport *report = nullptr);

  // Same pipeline over in-memory lines; line numbers are 1-based positions.
  static std::shared_ptr<const Catalog> from_lines(
      const std::vector<std::string> &lines,
      std::vector<chem::ReactionTemplate> templates,
      const CatalogOptions &options = {}, LoadReport *report = nullptr);

  int size() const { return static_cast<int>(blocks_.size()); }
  const Block &block(int id) const { return blocks_.at(id); }
  const std::vector<Block> &blocks() const { return blocks_; }
  std::optional<int> find(const chem::CanonicalKey &key) const;
  int fingerprint_dim() const { return options_.fingerprint_dim; }

  int num_templates() const { return static_cast<int>(templates_.size()); }
  const chem::ReactionTemplate &reaction(int t) const { return templates_.at(t); }
  const std::vector<chem::ReactionTemplate> &templates() const { return templates_; }
  int template_index(const std::string &name) const;  // throws kNotFound

  // Blocks matching a reactant slot pattern (sorted ids).
  const std::vector<int> &slot_blocks(int t, int slot) const;
  // (template, slot) pairs satisfied by a block.
  const std::vector<SlotRef> &block_slots(int id) const { return block_slots_.at(id); }

  // All (template, slot) pairs whose slot pattern matches `mol`.
  std::vector<SlotRef> compatible_templates(const chem::Molecule &mol,
                                            const chem::CanonicalKey &key) const;

  // Blocks for `slot`; with a partner, only those giving a nonempty
  // apply_reaction(t, {partner, block}).
  std::vector<int> compatible_blocks(int t, int slot) const;
  std::vector<int> compatible_blocks(int t, int slot, const chem::Molecule &partner,
                                     const chem::CanonicalKey &partner_key) const;

  // Memoized apply_reaction. Keys must be the canonical keys of the inputs.
  std::vector<chem::Product> react(int t, const chem::Molecule &a,
                                   const chem::CanonicalKey &ka) const;
  std::vector<chem::Product> react(int t, const chem::Molecule &a,
                                   const chem::CanonicalKey &ka,
                                   const chem::Molecule &b,
                                   const chem::CanonicalKey &kb) const;

  // Persists the slot tables as bitsets; verify_index() checks the catalog
  // digest and table contents and returns false on any mismatch.
  void save_index(const std::filesystem::path &path) const;
  bool verify_index(const std::filesystem::path &path) const;

  // Digest of block keys and template texts, used to tag cache files.
  std::uint64_t digest() const;

  std::size_t memo_size() const;

private:
  Catalog() = default;

  void build(const std::vector<std::string> &lines, LoadReport &report);

  struct PairKey {
    int t;
    std::string a;
    std::string b;
    friend bool operator==(const PairKey &, const PairKey &) = default;
  };
  struct PairKeyHash {
    std::size_t operator()(const PairKey &k) const;
  };

  CatalogOptions options_;
  std::vector<chem::ReactionTemplate> templates_;
  std::vector<Block> blocks_;
  std::unordered_map<chem::CanonicalKey, int> by_key_;
  std::vector<std::vector<std::vector<int>>> slot_blocks_;  // [t][slot]
  std::vector<std::vector<SlotRef>> block_slots_;

  mutable std::unique_ptr<LruCache<PairKey, std::vector<chem::Product>, PairKeyHash>>
      reaction_memo_;
  mutable std::unique_ptr<LruCache<std::string, std::vector<SlotRef>>> template_memo_;
  mutable std::unique_ptr<LruCache<PairKey, std::vector<int>, PairKeyHash>>
      partner_memo_;
};

using CatalogPtr = std::shared_ptr<const Catalog>;

}  // namespace synroute

#endif  // SYNROUTE_CATALOG_H_
