//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "graph_oracle.h"
#include "synroute/chem/descriptors.h"
#include "synroute/chem/fingerprint.h"
#include "synroute/chem/smiles.h"

namespace synroute::chem {
namespace {

// Readable environment labels built the slow way: each level concatenates
// the previous label with the sorted (bond, neighbour label) list.
std::vector<std::vector<std::string>> string_envs(const Molecule &m, int radius) {
  const int n = m.num_atoms();
  std::vector<std::vector<std::string>> env(radius + 1, std::vector<std::string>(n));
  for (int i = 0; i < n; ++i) {
    const Atom &a = m.atom(i);
    env[0][i] = std::to_string(atomic_number(a.element)) + "," +
                std::to_string(m.degree(i)) + "," + std::to_string(a.hydrogens) +
                "," + std::to_string(a.charge) + "," +
                std::to_string(m.atom_in_ring(i)) + "," + std::to_string(a.aromatic);
  }
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> parts;
      for (const auto &nb : m.neighbors(i))
        parts.push_back(std::to_string(static_cast<int>(m.bond(nb.bond).order)) +
                        "{" + env[r - 1][nb.atom] + "}");
      std::sort(parts.begin(), parts.end());
      std::string s = "(" + env[r - 1][i] + ")[";
      for (const auto &p : parts) s += p;
      env[r][i] = s + "]";
    }
  }
  return env;
}

TEST(Morgan, IdentifiersMatchEnvironmentOracle) {
  const char *smiles[] = {"CCO", "CCN", "c1ccccc1CC(=O)O", "CNC(C)=O",
                          "OC(=O)c1ccncc1", "C1CCNCC1", "Brc1ccc(I)cc1"};
  std::map<std::string, std::uint64_t> label_to_id;
  std::map<std::uint64_t, std::string> id_to_label;
  for (const char *s : smiles) {
    Molecule m = parse_smiles(s);
    auto ids = morgan_atom_ids(m, 2);
    auto labels = string_envs(m, 2);
    for (int r = 0; r <= 2; ++r) {
      for (int i = 0; i < m.num_atoms(); ++i) {
        const std::string key = std::to_string(r) + ":" + labels[r][i];
        auto [it, fresh] = label_to_id.emplace(key, ids[r][i]);
        EXPECT_EQ(it->second, ids[r][i]) << key;
        auto [jt, fresh2] = id_to_label.emplace(ids[r][i], key);
        EXPECT_EQ(jt->second, key);
      }
    }
  }
}

TEST(Morgan, MethylEnvironmentsShared) {
  Molecule ethanol = parse_smiles("CCO");
  Molecule ethylamine = parse_smiles("CCN");
  auto a = morgan_atom_ids(ethanol, 2);
  auto b = morgan_atom_ids(ethylamine, 2);
  EXPECT_EQ(a[0][0], b[0][0]);
  EXPECT_EQ(a[1][0], b[1][0]);
  EXPECT_NE(a[2][0], b[2][0]);
  auto fa = morgan_count_fp(ethanol, 2, 2048);
  auto fb = morgan_count_fp(ethylamine, 2, 2048);
  auto bucket = static_cast<std::uint32_t>(a[1][0] % 2048);
  auto find = [&](const CountFingerprint &f) {
    for (const auto &[i, c] : f.entries) if (i == bucket) return c;
    return 0u;
  };
  EXPECT_GE(find(fa), 1u);
  EXPECT_EQ(find(fa), find(fb));
}

TEST(Morgan, CountsAndInvariance) {
  Molecule m = parse_smiles("c1ccccc1CC(=O)O");
  auto fp = morgan_count_fp(m, 2, 2048);
  EXPECT_EQ(fp.l1(), static_cast<std::uint64_t>(3 * m.num_atoms()));
  EXPECT_DOUBLE_EQ(tanimoto(fp, fp), 1.0);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t)
    EXPECT_EQ(morgan_count_fp(testing::shuffled(m, rng), 2, 2048), fp);
  EXPECT_TRUE(std::is_sorted(fp.entries.begin(), fp.entries.end()));
}

TEST(Tanimoto, Examples) {
  auto x = make_fingerprint(8, {{1, 1}});
  auto y = make_fingerprint(8, {{1, 1}, {2, 1}});
  auto z = make_fingerprint(8, {{5, 3}});
  EXPECT_DOUBLE_EQ(tanimoto(x, y), 0.5);
  EXPECT_DOUBLE_EQ(tanimoto(x, x), 1.0);
  EXPECT_DOUBLE_EQ(tanimoto(x, z), 0.0);
  EXPECT_DOUBLE_EQ(tanimoto(make_fingerprint(8, {}), make_fingerprint(8, {})), 0.0);
  EXPECT_DOUBLE_EQ(containment(y, x), 0.5);
}

TEST(Tanimoto, RandomPairProperties) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> nnz(0, 12), idx(0, 63), cnt(1, 5);
  auto random_fp = [&]() {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (int k = nnz(rng); k > 0; --k)
      e.push_back({static_cast<std::uint32_t>(idx(rng)),
                   static_cast<std::uint32_t>(cnt(rng))});
    return make_fingerprint(64, e);
  };
  for (int t = 0; t < 100000; ++t) {
    auto a = random_fp();
    auto b = random_fp();
    const double s = tanimoto(a, b);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
    ASSERT_EQ(s, tanimoto(b, a));
    // Direct dense evaluation.
    double lo = 0, hi = 0;
    std::vector<int> da(64, 0), db(64, 0);
    for (auto [i, c] : a.entries) da[i] = c;
    for (auto [i, c] : b.entries) db[i] = c;
    for (int i = 0; i < 64; ++i) {
      lo += std::min(da[i], db[i]);
      hi += std::max(da[i], db[i]);
    }
    ASSERT_DOUBLE_EQ(s, hi == 0 ? 0.0 : lo / hi);
  }
}

TEST(Descriptors, MurckoScaffold) {
  EXPECT_EQ(canonical_key(murcko_scaffold(parse_smiles("CCc1ccccc1"))),
            canonical_key(parse_smiles("c1ccccc1")));
  EXPECT_TRUE(murcko_scaffold(parse_smiles("CCCC")).empty());
  EXPECT_EQ(canonical_key(murcko_scaffold(parse_smiles("c1ccccc1CCC1CCNCC1CO"))),
            canonical_key(parse_smiles("c1ccccc1CCC1CCNCC1")));
  const char *corpus[] = {"CCc1ccccc1", "OC(=O)c1ccc(cc1)-c1ccncc1", "C1CC1CC",
                          "CC(C)(C)OC(=O)N1CCNCC1"};
  for (const char *s : corpus) {
    Molecule sc = murcko_scaffold(parse_smiles(s));
    EXPECT_FALSE(sanitize_problem(sc)) << s;
    EXPECT_EQ(canonical_key(murcko_scaffold(sc)), canonical_key(sc));
  }
}

TEST(Descriptors, Weight) {
  EXPECT_NEAR(molecular_weight(parse_smiles("C")), 16.04, 0.01);
  EXPECT_NEAR(molecular_weight(parse_smiles("CCO")), 46.07, 0.01);
  EXPECT_NEAR(molecular_weight(parse_smiles("c1ccccc1")), 78.11, 0.01);
}

TEST(Descriptors, Formula) {
  auto f = formula_counts(parse_smiles("Cc1ccccc1"));
  EXPECT_EQ(f, (std::map<std::string, int> {{"C", 7}, {"H", 8}}));
  EXPECT_EQ(parse_formula("C7H8"), f);
  EXPECT_EQ(parse_formula("CH4NCl"),
            (std::map<std::string, int> {{"C", 1}, {"H", 4}, {"N", 1}, {"Cl", 1}}));
}

}  // namespace
}  // namespace synroute::chem
