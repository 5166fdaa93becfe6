//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "synroute/synroute_c.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string data(const std::string &name) { return std::string(SYNROUTE_DATA_DIR) + "/" + name; }

// Takes ownership of a returned string.
std::string take(char *s) {
  std::string out = s ? s : "";
  synroute_string_free(s);
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &tag)
      : path(fs::temp_directory_path() / ("synroute_capi_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(synroute_version(), "0.1.0");
  EXPECT_STREQ(synroute_status_name(SYNROUTE_OK), "ok");
  EXPECT_STREQ(synroute_status_name(SYNROUTE_E_IO), "io_error");
  EXPECT_STREQ(synroute_status_name(SYNROUTE_E_EXISTS), "already_exists");
  EXPECT_STREQ(synroute_status_name(static_cast<synroute_status>(99)), "unknown");
}

TEST(CApi, Canonicalize) {
  char *a = nullptr, *b = nullptr;
  ASSERT_EQ(synroute_canonicalize("OCC", &a), SYNROUTE_OK);
  ASSERT_EQ(synroute_canonicalize("C(O)C", &b), SYNROUTE_OK);
  EXPECT_EQ(take(a), take(b));
  char *bad = nullptr;
  EXPECT_EQ(synroute_canonicalize("C(C", &bad), SYNROUTE_E_PARSE);
  EXPECT_EQ(bad, nullptr);
  EXPECT_NE(std::string(synroute_last_error()), "");
  EXPECT_EQ(synroute_canonicalize(nullptr, &bad), SYNROUTE_E_INVALID_ARGUMENT);
  ASSERT_EQ(synroute_canonicalize("C", &a), SYNROUTE_OK);
  EXPECT_STREQ(synroute_last_error(), "");
  take(a);
}

TEST(CApi, CatalogRoutesAndValidation) {
  synroute_catalog *cat = nullptr;
  ASSERT_EQ(synroute_catalog_load(data("toy_blocks.smi").c_str(), data("templates.tsv").c_str(), nullptr, &cat),
            SYNROUTE_OK)
      << synroute_last_error();
  EXPECT_EQ(synroute_catalog_size(cat), 200);
  char *info = nullptr;
  ASSERT_EQ(synroute_catalog_info(cat, &info), SYNROUTE_OK);
  const json j = json::parse(take(info));
  EXPECT_EQ(j.at("size"), 200);
  EXPECT_GT(j.at("templates").get<int>(), 0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    char *route = nullptr;
    ASSERT_EQ(synroute_sample_route(cat, seed, 3, &route), SYNROUTE_OK) << synroute_last_error();
    const json r = json::parse(take(route));
    EXPECT_LE(r.at("steps").get<int>(), 3);
    EXPECT_FALSE(r.at("blocks").empty());
    std::int32_t valid = -1;
    ASSERT_EQ(synroute_validate_route(cat, r.at("route").get<std::string>().c_str(), &valid), SYNROUTE_OK)
        << synroute_last_error();
    EXPECT_EQ(valid, 1);

    char *again = nullptr;
    ASSERT_EQ(synroute_sample_route(cat, seed, 3, &again), SYNROUTE_OK);
    EXPECT_EQ(json::parse(take(again)), r);
  }
  std::int32_t valid = -1;
  EXPECT_NE(synroute_validate_route(cat, "(not a route", &valid), SYNROUTE_OK);
  EXPECT_EQ(valid, 0);
  synroute_catalog_free(cat);
}

TEST(CApi, CatalogErrors) {
  synroute_catalog *cat = reinterpret_cast<synroute_catalog *>(0x1);
  EXPECT_EQ(synroute_catalog_load("/nonexistent/blocks.smi", data("templates.tsv").c_str(), nullptr, &cat),
            SYNROUTE_E_IO);
  EXPECT_EQ(cat, nullptr);
  EXPECT_NE(std::string(synroute_last_error()).find("/nonexistent/blocks.smi"), std::string::npos);
  EXPECT_EQ(synroute_catalog_load(data("toy_blocks.smi").c_str(), data("templates.tsv").c_str(),
                                  "{\"colour\": 1}", &cat),
            SYNROUTE_E_INVALID_ARGUMENT);
  EXPECT_EQ(synroute_catalog_load(data("toy_blocks.smi").c_str(), data("templates.tsv").c_str(), "{", &cat),
            SYNROUTE_E_INVALID_ARGUMENT);
  EXPECT_EQ(synroute_catalog_size(nullptr), 0);
  synroute_catalog_free(nullptr);
}

TEST(CApi, TaskNames) {
  char *names = nullptr;
  ASSERT_EQ(synroute_task_names(&names), SYNROUTE_OK);
  const json j = json::parse(take(names));
  for (const char *t : {"blocks.prepare", "routes.sample", "dataset.gen", "filter.train", "filter.eval",
                        "nam.train", "ga.run", "gbo.run", "analog.search", "report"})
    EXPECT_NE(std::find(j.begin(), j.end(), t), j.end()) << t;
}

void collect(const char *line, void *user) { static_cast<std::vector<std::string> *>(user)->push_back(line); }

TEST(CApi, RunTaskWritesOutputsAndManifest) {
  TempDir dir("ga");
  const json cfg {{"out", dir.path.string()},
                  {"seed", 3},
                  {"oracle", {{"type", "formula"}, {"formula", "C10H12N2O"}}},
                  {"ga", {{"budget", 300}, {"population_size", 100}}}};
  std::vector<std::string> lines;
  char *summary = nullptr;
  ASSERT_EQ(synroute_run_task("ga.run", cfg.dump().c_str(), collect, &lines, &summary), SYNROUTE_OK)
      << synroute_last_error();
  const json s = json::parse(take(summary));
  EXPECT_EQ(s.at("oracle_calls"), 300);
  EXPECT_FALSE(lines.empty());
  for (const char *f : {"history.jsonl", "population.jsonl", "summary.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir.path / f)) << f;
  std::ifstream in(dir.path / "manifest.json");
  const json m = json::parse(in);
  EXPECT_EQ(m.at("command"), "ga.run");
  EXPECT_EQ(m.at("seed"), 3);
  EXPECT_FALSE(m.at("config").contains("out"));

  // A nonempty output directory is refused unless forced.
  EXPECT_EQ(synroute_run_task("ga.run", cfg.dump().c_str(), nullptr, nullptr, nullptr), SYNROUTE_E_EXISTS);
  json forced = cfg;
  forced["force"] = true;
  EXPECT_EQ(synroute_run_task("ga.run", forced.dump().c_str(), nullptr, nullptr, nullptr), SYNROUTE_OK);
}

TEST(CApi, RunTaskErrors) {
  TempDir dir("err");
  EXPECT_EQ(synroute_run_task("no.such.task", "{}", nullptr, nullptr, nullptr), SYNROUTE_E_INVALID_ARGUMENT);
  EXPECT_EQ(synroute_run_task("ga.run", "not json", nullptr, nullptr, nullptr), SYNROUTE_E_INVALID_ARGUMENT);
  const json unknown {{"out", dir.path.string()}, {"oracle", {{"type", "formula"}, {"formula", "C7H8"}}}, {"bugdet", 3}};
  EXPECT_EQ(synroute_run_task("ga.run", unknown.dump().c_str(), nullptr, nullptr, nullptr),
            SYNROUTE_E_INVALID_ARGUMENT);
  EXPECT_NE(std::string(synroute_last_error()).find("bugdet"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir.path));
  const json small {{"out", dir.path.string()}, {"oracle", {{"type", "formula"}, {"formula", "C7H8"}}},
                    {"ga", {{"budget", 10}}}};
  EXPECT_EQ(synroute_run_task("ga.run", small.dump().c_str(), nullptr, nullptr, nullptr),
            SYNROUTE_E_INVALID_ARGUMENT);
  EXPECT_FALSE(fs::exists(dir.path));
  const json missing {{"out", dir.path.string()}, {"blocks", "/nonexistent.smi"}, {"force", true}};
  EXPECT_EQ(synroute_run_task("blocks.prepare", missing.dump().c_str(), nullptr, nullptr, nullptr), SYNROUTE_E_IO);
}

}  // namespace
