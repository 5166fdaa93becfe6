//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "synroute/synroute_c.h"

using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string blocks;
  std::string templates;
  bool force = false;
  bool csv = false;
  bool quiet = false;
};

// Task-specific flags, stored as JSON values keyed by config path.
struct Command {
  std::string task;
  CLI::App *app = nullptr;
  CommonFlags common;
  std::map<std::string, std::string> strings;
  std::map<std::string, std::optional<double>> numbers;
  std::map<std::string, std::optional<std::int64_t>> integers;
  std::map<std::string, std::string> json_values;
  std::vector<std::string> runs;
};

void add_common(Command &c, bool needs_catalog) {
  c.app->add_option("--config", c.common.config, "JSON config file or a manifest.json to rerun");
  c.app->add_option("--seed", c.common.seed, "Random seed");
  c.app->add_option("--workers", c.common.workers, "Worker threads");
  c.app->add_option("--out", c.common.out, "Output directory");
  c.app->add_flag("--force", c.common.force, "Overwrite a nonempty output directory");
  c.app->add_flag("--csv", c.common.csv, "Also write CSV tables");
  c.app->add_flag("--quiet", c.common.quiet, "No progress output");
  if (needs_catalog) {
    c.app->add_option("--blocks", c.common.blocks, "Building-block SMILES file");
    c.app->add_option("--templates", c.common.templates, "Reaction template TSV file");
  }
}

json load_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return json::parse(buf.str());
}

// Sets a dotted key path ("ga.budget") on a config object.
void set_path(json &cfg, const std::string &path, json value) {
  json *node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

json build_config(const Command &c) {
  json cfg = c.common.config.empty() ? json::object() : load_json_file(c.common.config);
  const bool manifest = cfg.is_object() && cfg.contains("manifest_version");
  // A manifest carries its own config; only output placement may change.
  json &target = manifest ? cfg["config"] : cfg;
  if (!c.common.out.empty()) cfg["out"] = c.common.out;
  if (c.common.force) cfg["force"] = true;
  if (manifest) {
    if (c.common.seed || c.common.workers || !c.common.blocks.empty() || !c.common.templates.empty())
      throw CLI::ValidationError("rerunning a manifest only accepts --out and --force");
    return cfg;
  }
  if (c.common.seed) target["seed"] = *c.common.seed;
  if (c.common.workers) target["workers"] = *c.common.workers;
  if (!c.common.blocks.empty()) target["blocks"] = c.common.blocks;
  if (!c.common.templates.empty()) target["templates"] = c.common.templates;
  if (c.common.csv) target["csv"] = true;
  for (const auto &[k, v] : c.strings)
    if (!v.empty()) set_path(target, k, v);
  for (const auto &[k, v] : c.numbers)
    if (v) set_path(target, k, *v);
  for (const auto &[k, v] : c.integers)
    if (v) set_path(target, k, *v);
  for (const auto &[k, v] : c.json_values)
    if (!v.empty()) set_path(target, k, json::parse(v));
  if (!c.runs.empty()) target["runs"] = c.runs;
  return cfg;
}

int exit_code(synroute_status s) {
  switch (s) {
  case SYNROUTE_OK:
    return 0;
  case SYNROUTE_E_INVALID_ARGUMENT:
  case SYNROUTE_E_PARSE:
  case SYNROUTE_E_VALENCE:
  case SYNROUTE_E_IO:
  case SYNROUTE_E_NOT_FOUND:
    return 2;
  case SYNROUTE_E_EXISTS:
    return 3;
  default:
    return 1;
  }
}

void report_error(const std::string &code, const std::string &message) {
  std::cerr << json {{"error", code}, {"message", message}}.dump() << "\n";
  std::cerr << "synroute: " << message << "\n";
}

void print_progress(const char *line, void *) { std::cerr << line << "\n"; }

}  // namespace

int main(int argc, char **argv) {
  CLI::App app {"Synthesis-constrained molecular design with genetic algorithms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(synroute_version()));
  std::vector<std::unique_ptr<Command>> commands;

  auto add = [&](CLI::App *parent, const std::string &name, const std::string &task,
                 const std::string &help, bool needs_catalog = true) -> Command & {
    auto c = std::make_unique<Command>();
    c->task = task;
    c->app = parent->add_subcommand(name, help);
    add_common(*c, needs_catalog);
    commands.push_back(std::move(c));
    return *commands.back();
  };
  auto group = [&](const std::string &name, const std::string &help) {
    auto *g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };

  auto *blocks = group("blocks", "Building-block catalogs");
  add(blocks, "prepare", "blocks.prepare", "Load, deduplicate and index a block catalog");

  auto *routes = group("routes", "Synthesis routes");
  {
    auto &c = add(routes, "sample", "routes.sample", "Sample random routes");
    c.app->add_option("--n", c.integers["n"], "Number of routes");
    c.app->add_option("--max-steps", c.integers["max_steps"], "Reaction steps per route");
    c.app->add_option("--oracle", c.json_values["oracle"], "Oracle spec (JSON) to score routes");
  }

  auto *dataset = group("dataset", "Route datasets");
  {
    auto &c = add(dataset, "gen", "dataset.gen", "Generate a product/block dataset");
    c.app->add_option("--n", c.integers["n"], "Number of unique products");
    c.app->add_option("--heldout", c.numbers["heldout"], "Held-out fraction");
  }

  auto *filter = group("filter", "Block classifiers");
  {
    auto &c = add(filter, "train", "filter.train", "Train the block classifier");
    c.app->add_option("--dataset", c.strings["dataset"], "dataset.jsonl");
    c.app->add_option("--steps", c.integers["classifier.steps"], "Training steps");
    c.app->add_option("--hard-negatives", c.json_values["classifier.hard_negatives"],
                      "true or false");
  }
  {
    auto &c = add(filter, "eval", "filter.eval", "Evaluate a block classifier");
    c.app->add_option("--dataset", c.strings["dataset"], "dataset.jsonl");
    c.app->add_option("--model", c.strings["model"], "model.bin");
    c.app->add_option("--split", c.strings["split"], "heldout, train or all");
  }

  auto *nam = group("nam", "Neural additive block models");
  {
    auto &c = add(nam, "train", "nam.train", "Train a NAM on scored routes");
    c.app->add_option("--history", c.strings["history"], "JSONL with blocks and fitness");
    c.app->add_option("--top-k", c.integers["top_k"], "Blocks kept by the top-k filter");
  }

  auto *ga = group("ga", "SynGA");
  {
    auto &c = add(ga, "run", "ga.run", "Run the synthesis-constrained GA");
    c.app->add_option("--oracle", c.json_values["oracle"], "Oracle spec (JSON)");
    c.app->add_option("--budget", c.integers["ga.budget"], "Oracle calls");
    c.app->add_option("--filter", c.json_values["filter"], "Block filter spec (JSON)");
  }

  auto *gbo = group("gbo", "SynGBO");
  {
    auto &c = add(gbo, "run", "gbo.run", "Run GP-guided SynGA");
    c.app->add_option("--oracle", c.json_values["oracle"], "Oracle spec (JSON)");
    c.app->add_option("--budget", c.integers["gbo.budget"], "Oracle calls");
    c.app->add_option("--preset", c.strings["preset"], "desk or full");
  }

  auto *analog = group("analog", "Analog search");
  {
    auto &c = add(analog, "search", "analog.search", "Search synthesizable analogs of a query");
    c.app->add_option("--query", c.strings["query"], "Query SMILES");
    c.app->add_option("--budget", c.integers["ga.budget"], "Oracle calls");
    c.app->add_option("--filter", c.strings["filter.kind"], "none, sim, classifier or nam");
    c.app->add_option("--model", c.strings["filter.model"], "Classifier or NAM model file");
    c.app->add_option("--top", c.integers["top"], "Analogs written");
  }

  {
    auto &c = add(&app, "report", "report", "Summarize run directories", false);
    c.app->add_option("runs", c.runs, "Run directories")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    report_error("usage", e.what());
    return 2;
  }

  for (const auto &c : commands) {
    if (!c->app->parsed()) continue;
    json cfg;
    try {
      cfg = build_config(*c);
    } catch (const std::exception &e) {
      report_error("invalid_argument", e.what());
      return 2;
    }
    char *summary = nullptr;
    const synroute_status s =
        synroute_run_task(c->task.c_str(), cfg.dump().c_str(),
                          c->common.quiet ? nullptr : print_progress, nullptr, &summary);
    if (s != SYNROUTE_OK) {
      report_error(synroute_status_name(s), synroute_last_error());
      return exit_code(s);
    }
    std::cout << json::parse(summary).dump(2) << "\n";
    synroute_string_free(summary);
    return 0;
  }
  return 2;
}
