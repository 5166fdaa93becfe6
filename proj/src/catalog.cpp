//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/catalog.h"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "synroute/chem/descriptors.h"
#include "synroute/error.h"

namespace synroute {
namespace {

constexpr char kIndexMagic[8] = {'S', 'Y', 'N', 'R', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kIndexVersion = 1;

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

template <class T>
void put(std::ofstream &out, T v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream &in, T &v) {
  return static_cast<bool>(in.read(reinterpret_cast<char *>(&v), sizeof(T)));
}

}  // namespace

std::size_t Catalog::PairKeyHash::operator()(const PairKey &k) const {
  std::uint64_t h = fnv1a(0xcbf29ce484222325ULL, k.a);
  h = fnv1a(h ^ 0xff, k.b);
  return static_cast<std::size_t>(h ^ (static_cast<std::uint64_t>(k.t) << 1));
}

std::shared_ptr<const Catalog> Catalog::load(
    const std::filesystem::path &blocks_path,
    std::vector<chem::ReactionTemplate> templates, const CatalogOptions &options,
    LoadReport *report) {
  std::ifstream in(blocks_path);
  if (!in)
    throw Error(ErrorCode::kIo, "cannot open blocks file " + blocks_path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return from_lines(lines, std::move(templates), options, report);
}

std::shared_ptr<const Catalog> Catalog::from_lines(
    const std::vector<std::string> &lines,
    std::vector<chem::ReactionTemplate> templates, const CatalogOptions &options,
    LoadReport *report) {
  std::shared_ptr<Catalog> c(new Catalog());
  c->options_ = options;
  c->templates_ = std::move(templates);
  LoadReport local;
  c->build(lines, local);
  if (report) *report = std::move(local);
  return c;
}

void Catalog::build(const std::vector<std::string> &lines, LoadReport &report) {
  const int nt = num_templates();
  slot_blocks_.assign(nt, {});
  for (int t = 0; t < nt; ++t) slot_blocks_[t].assign(templates_[t].arity(), {});

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string text = trim(lines[ln]);
    if (text.empty() || text[0] == '#') continue;
    ++report.lines;
    // Anything after whitespace is treated as a name/comment column.
    const auto ws = text.find_first_of(" \t");
    std::string smiles = ws == std::string::npos ? text : text.substr(0, ws);

    chem::Molecule mol;
    try {
      mol = chem::parse_smiles(smiles);
    } catch (const Error &e) {
      if (options_.strict)
        throw Error(e.code(), "line " + std::to_string(ln + 1) + ": " + e.what());
      report.failures.push_back({static_cast<int>(ln + 1), smiles, e.what()});
      continue;
    }
    ++report.parsed;
    chem::CanonicalKey key = chem::canonical_key(mol);
    if (by_key_.count(key)) {
      ++report.duplicates;
      continue;
    }

    std::vector<SlotRef> slots;
    for (int t = 0; t < nt; ++t)
      for (int s = 0; s < templates_[t].arity(); ++s)
        if (chem::has_match(templates_[t].reactants[s], mol)) slots.push_back({t, s});
    if (slots.empty()) {
      ++report.unsupported;
      continue;
    }

    Block b;
    b.id = size();
    b.weight = chem::molecular_weight(mol);
    b.fp = chem::morgan_count_fp(mol, chem::kMorganRadius, options_.fingerprint_dim);
    b.mol = std::make_shared<const chem::Molecule>(std::move(mol));
    b.key = key;
    for (const auto &sr : slots) slot_blocks_[sr.template_index][sr.slot].push_back(b.id);
    by_key_.emplace(std::move(key), b.id);
    block_slots_.push_back(std::move(slots));
    blocks_.push_back(std::move(b));
  }

  reaction_memo_ = std::make_unique<
      LruCache<PairKey, std::vector<chem::Product>, PairKeyHash>>(options_.memo_capacity);
  template_memo_ =
      std::make_unique<LruCache<std::string, std::vector<SlotRef>>>(options_.memo_capacity);
  partner_memo_ = std::make_unique<LruCache<PairKey, std::vector<int>, PairKeyHash>>(
      options_.memo_capacity);
}

std::optional<int> Catalog::find(const chem::CanonicalKey &key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

int Catalog::template_index(const std::string &name) const {
  for (int t = 0; t < num_templates(); ++t)
    if (templates_[t].name == name) return t;
  throw Error(ErrorCode::kNotFound, "unknown template " + name);
}

const std::vector<int> &Catalog::slot_blocks(int t, int slot) const {
  if (t < 0 || t >= num_templates())
    throw Error(ErrorCode::kNotFound, "unknown template index " + std::to_string(t));
  if (slot < 0 || slot >= templates_[t].arity())
    throw Error(ErrorCode::kInvalidArgument, "template " + templates_[t].name
                                                 + " has no slot " + std::to_string(slot));
  return slot_blocks_[t][slot];
}

std::vector<SlotRef> Catalog::compatible_templates(const chem::Molecule &mol,
                                                   const chem::CanonicalKey &key) const {
  if (auto id = find(key)) return block_slots_[*id];
  if (auto hit = template_memo_->get(key.text)) return *hit;
  std::vector<SlotRef> out;
  for (int t = 0; t < num_templates(); ++t)
    for (int s = 0; s < templates_[t].arity(); ++s)
      if (chem::has_match(templates_[t].reactants[s], mol)) out.push_back({t, s});
  template_memo_->put(key.text, out);
  return out;
}

std::vector<int> Catalog::compatible_blocks(int t, int slot) const {
  return slot_blocks(t, slot);
}

std::vector<int> Catalog::compatible_blocks(int t, int slot,
                                            const chem::Molecule &partner,
                                            const chem::CanonicalKey &partner_key) const {
  const auto &candidates = slot_blocks(t, slot);
  if (templates_[t].arity() != 2)
    throw Error(ErrorCode::kInvalidArgument,
                "template " + templates_[t].name + " is unary; no partner allowed");
  PairKey memo_key {t * 2 + slot, partner_key.text, {}};
  if (auto hit = partner_memo_->get(memo_key)) return *hit;
  std::vector<int> out;
  for (int id : candidates) {
    const Block &b = blocks_[id];
    if (!react(t, partner, partner_key, *b.mol, b.key).empty()) out.push_back(id);
  }
  partner_memo_->put(memo_key, out);
  return out;
}

std::vector<chem::Product> Catalog::react(int t, const chem::Molecule &a,
                                          const chem::CanonicalKey &ka) const {
  PairKey memo_key {t, ka.text, {}};
  if (auto hit = reaction_memo_->get(memo_key)) return *hit;
  const chem::Molecule *in[] = {&a};
  auto out = chem::apply_reaction(templates_.at(t), in);
  reaction_memo_->put(memo_key, out);
  return out;
}

std::vector<chem::Product> Catalog::react(int t, const chem::Molecule &a,
                                          const chem::CanonicalKey &ka,
                                          const chem::Molecule &b,
                                          const chem::CanonicalKey &kb) const {
  // Binary application is symmetric (both assignments are tried), so the
  // memo key uses the sorted pair.
  PairKey memo_key = ka.text <= kb.text ? PairKey {t, ka.text, kb.text}
                                        : PairKey {t, kb.text, ka.text};
  if (auto hit = reaction_memo_->get(memo_key)) return *hit;
  const chem::Molecule *in[] = {&a, &b};
  auto out = chem::apply_reaction(templates_.at(t), in);
  reaction_memo_->put(memo_key, out);
  return out;
}

std::uint64_t Catalog::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto &b : blocks_) h = fnv1a(h, b.key.text + "\n");
  for (const auto &t : templates_) {
    h = fnv1a(h, t.name + "\t");
    for (const auto &r : t.reactants) h = fnv1a(h, r.text() + ".");
    h = fnv1a(h, t.product.text() + "\n");
  }
  return h;
}

std::size_t Catalog::memo_size() const {
  return reaction_memo_->size() + template_memo_->size() + partner_memo_->size();
}

// Layout (little-endian): magic[8] "SYNRIDX\0", u32 version, u64 digest,
// u32 block count, u32 template count, then per template a u32 arity and per
// slot ceil(blocks/64) u64 words; bit i of the slot bitset is set when block
// i matches the slot pattern.
void Catalog::save_index(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write index file " + path.string());
  out.write(kIndexMagic, sizeof(kIndexMagic));
  put<std::uint32_t>(out, kIndexVersion);
  put<std::uint64_t>(out, digest());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(num_templates()));
  const std::size_t words = (blocks_.size() + 63) / 64;
  for (int t = 0; t < num_templates(); ++t) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(templates_[t].arity()));
    for (int s = 0; s < templates_[t].arity(); ++s) {
      std::vector<std::uint64_t> bits(words, 0);
      for (int id : slot_blocks_[t][s]) bits[id / 64] |= 1ULL << (id % 64);
      for (auto w : bits) put(out, w);
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing index file " + path.string());
}

bool Catalog::verify_index(const std::filesystem::path &path) const {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kIndexMagic, 8) != 0) return false;
  std::uint32_t version = 0, nb = 0, nt = 0;
  std::uint64_t dig = 0;
  if (!get(in, version) || version != kIndexVersion) return false;
  if (!get(in, dig) || dig != digest()) return false;
  if (!get(in, nb) || !get(in, nt)) return false;
  if (static_cast<int>(nb) != size() || static_cast<int>(nt) != num_templates())
    return false;
  const std::size_t words = (blocks_.size() + 63) / 64;
  for (int t = 0; t < num_templates(); ++t) {
    std::uint32_t arity = 0;
    if (!get(in, arity) || static_cast<int>(arity) != templates_[t].arity()) return false;
    for (int s = 0; s < templates_[t].arity(); ++s) {
      std::vector<int> ids;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = 0;
        if (!get(in, bits)) return false;
        for (int k = 0; k < 64; ++k)
          if (bits >> k & 1ULL) ids.push_back(static_cast<int>(w * 64 + k));
      }
      if (ids != slot_blocks_[t][s]) return false;
    }
  }
  return true;
}

}  // namespace synroute
