//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/chem/fingerprint.h"

#include <algorithm>
#include <map>

#include "synroute/error.h"

namespace synroute::chem {
namespace {

// splitmix64 finalizer; the seed is fixed so identifiers are stable across
// platforms and runs.
constexpr std::uint64_t kHashSeed = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix(h ^ mix(v));
}

}  // namespace

std::uint64_t CountFingerprint::l1() const {
  std::uint64_t s = 0;
  for (const auto &[i, c] : entries) s += c;
  return s;
}

std::vector<std::vector<std::uint64_t>> morgan_atom_ids(const Molecule &mol,
                                                       int radius) {
  const int n = mol.num_atoms();
  std::vector<std::vector<std::uint64_t>> ids(radius + 1,
                                              std::vector<std::uint64_t>(n));
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    std::uint64_t h = kHashSeed;
    h = combine(h, static_cast<std::uint64_t>(atomic_number(a.element)));
    h = combine(h, static_cast<std::uint64_t>(mol.degree(i)));
    h = combine(h, static_cast<std::uint64_t>(a.hydrogens));
    h = combine(h, static_cast<std::uint64_t>(a.charge + 128));
    h = combine(h, mol.atom_in_ring(i) ? 1u : 0u);
    h = combine(h, a.aromatic ? 1u : 0u);
    ids[0][i] = h;
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      env.clear();
      for (const auto &nb : mol.neighbors(i))
        env.push_back({static_cast<std::uint64_t>(mol.bond(nb.bond).order),
                       ids[r - 1][nb.atom]});
      std::sort(env.begin(), env.end());
      std::uint64_t h = combine(ids[r - 1][i], static_cast<std::uint64_t>(r));
      for (const auto &[order, id] : env) h = combine(combine(h, order), id);
      ids[r][i] = h;
    }
  }
  return ids;
}

CountFingerprint morgan_count_fp(const Molecule &mol, int radius, int dim) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "fingerprint dim must be positive");
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto &level : morgan_atom_ids(mol, radius))
    for (std::uint64_t id : level) ++counts[static_cast<std::uint32_t>(id % dim)];
  CountFingerprint fp;
  fp.dim = dim;
  fp.entries.assign(counts.begin(), counts.end());
  return fp;
}

CountFingerprint make_fingerprint(
    int dim, std::vector<std::pair<std::uint32_t, std::uint32_t>> entries) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto &[i, c] : entries) {
    if (static_cast<int>(i) >= dim)
      throw Error(ErrorCode::kInvalidArgument, "fingerprint index out of range");
    counts[i] += c;
  }
  CountFingerprint fp;
  fp.dim = dim;
  for (const auto &[i, c] : counts)
    if (c > 0) fp.entries.push_back({i, c});
  return fp;
}

std::pair<std::uint64_t, std::uint64_t> min_max_sums(const CountFingerprint &x,
                                                     const CountFingerprint &y) {
  std::uint64_t lo = 0, hi = 0;
  std::size_t i = 0, j = 0;
  while (i < x.entries.size() && j < y.entries.size()) {
    const auto &a = x.entries[i];
    const auto &b = y.entries[j];
    if (a.first == b.first) {
      lo += std::min(a.second, b.second);
      hi += std::max(a.second, b.second);
      ++i;
      ++j;
    } else if (a.first < b.first) {
      hi += a.second;
      ++i;
    } else {
      hi += b.second;
      ++j;
    }
  }
  for (; i < x.entries.size(); ++i) hi += x.entries[i].second;
  for (; j < y.entries.size(); ++j) hi += y.entries[j].second;
  return {lo, hi};
}

double tanimoto(const CountFingerprint &x, const CountFingerprint &y) {
  const auto [lo, hi] = min_max_sums(x, y);
  if (hi == 0) return 0.0;
  return static_cast<double>(lo) / static_cast<double>(hi);
}

double containment(const CountFingerprint &b, const CountFingerprint &q) {
  const auto total = b.l1();
  if (total == 0) return 0.0;
  return static_cast<double>(min_max_sums(b, q).first) / static_cast<double>(total);
}

void to_dense(const CountFingerprint &fp, float *out) {
  std::fill(out, out + fp.dim, 0.0f);
  for (const auto &[i, c] : fp.entries) out[i] = static_cast<float>(c);
}

}  // namespace synroute::chem
