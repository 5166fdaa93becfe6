//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/tasks.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Core>

#include "synroute/blockfilter.h"
#include "synroute/chem/descriptors.h"
#include "synroute/chem/smiles.h"
#include "synroute/error.h"
#include "synroute/genetic.h"
#include "synroute/io.h"
#include "synroute/oracles.h"
#include "synroute/surrogate.h"

#ifndef SYNROUTE_DEFAULT_DATA_DIR
#define SYNROUTE_DEFAULT_DATA_DIR "data"
#endif

namespace synroute {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> &task_names() {
  static const std::vector<std::string> names {
      "blocks.prepare", "routes.sample", "dataset.gen", "filter.train", "filter.eval",
      "nam.train",      "ga.run",        "gbo.run",     "analog.search", "report"};
  return names;
}

fs::path default_data_dir() {
  if (const char *env = std::getenv("SYNROUTE_DATA_DIR"); env && *env) return env;
  return SYNROUTE_DEFAULT_DATA_DIR;
}

namespace {

void check_keys(const json &cfg, const std::string &what, std::initializer_list<const char *> keys) {
  if (!cfg.is_object()) throw Error(ErrorCode::kInvalidArgument, what + " must be a JSON object");
  for (const auto &[k, v] : cfg.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char *x) { return k == x; }))
      throw Error(ErrorCode::kInvalidArgument, "unknown " + what + " key '" + k + "'");
  }
}

template <class T>
T opt(const json &cfg, const char *key, T fallback) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad value for '") + key + "'");
  }
}

std::string required_string(const json &cfg, const char *key) {
  if (!cfg.contains(key) || !cfg.at(key).is_string())
    throw Error(ErrorCode::kInvalidArgument, std::string("missing required '") + key + "'");
  return cfg.at(key).get<std::string>();
}

// Keys every task accepts.
#define SYNROUTE_COMMON_KEYS "blocks", "templates", "out", "force", "seed", "workers", "strict", "csv"

struct Inputs {
  fs::path blocks;
  fs::path templates;
  std::shared_ptr<const Catalog> catalog;
  LoadReport report;
};

Inputs load_inputs(const json &cfg) {
  Inputs in;
  const fs::path data = default_data_dir();
  in.blocks = opt<std::string>(cfg, "blocks", (data / "toy_blocks.smi").string());
  in.templates = opt<std::string>(cfg, "templates", (data / "templates.tsv").string());
  if (!fs::exists(in.blocks))
    throw Error(ErrorCode::kIo, "blocks file not found: " + in.blocks.string());
  if (!fs::exists(in.templates))
    throw Error(ErrorCode::kIo, "templates file not found: " + in.templates.string());
  CatalogOptions options;
  options.strict = opt<bool>(cfg, "strict", false);
  in.catalog = Catalog::load(in.blocks, chem::load_templates(in.templates), options, &in.report);
  return in;
}

// Output directory guard: refuses to write into a nonempty directory without
// `force`, never writes over one of the task's inputs, and records the files
// it wrote for the manifest.
class OutputDir {
public:
  OutputDir(const json &cfg, std::vector<fs::path> inputs): inputs_(std::move(inputs)) {
    dir_ = required_string(cfg, "out");
    const bool force = opt<bool>(cfg, "force", false);
    if (fs::exists(dir_) && !fs::is_directory(dir_))
      throw Error(ErrorCode::kExists, "output path exists and is not a directory: " + dir_.string());
    if (fs::exists(dir_) && !fs::is_empty(dir_) && !force)
      throw Error(ErrorCode::kExists,
                  "output directory is not empty: " + dir_.string() + " (pass --force to overwrite)");
  }

  // The directory is created on first use, so a run that fails while still
  // validating its config leaves nothing behind.
  fs::path path(const std::string &name) {
    fs::create_directories(dir_);
    const fs::path p = dir_ / name;
    for (const auto &in : inputs_) {
      std::error_code ec;
      if (fs::exists(in) && fs::exists(p) && fs::equivalent(in, p, ec))
        throw Error(ErrorCode::kExists, "refusing to overwrite input file " + in.string());
    }
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return p;
  }

  void write(const std::string &name, const std::string &contents) {
    write_file_atomic(path(name), contents);
  }
  void write_json(const std::string &name, const json &j) { write(name, j.dump(2) + "\n"); }
  void write_jsonl(const std::string &name, const std::vector<json> &rows) {
    std::string out;
    for (const auto &r : rows) out += r.dump() + "\n";
    write(name, out);
  }

  const fs::path &dir() const { return dir_; }
  const std::vector<std::string> &files() const { return files_; }

private:
  fs::path dir_;
  std::vector<fs::path> inputs_;
  std::vector<std::string> files_;
};

std::string csv_cell(const json &v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

std::string to_csv(const std::vector<json> &rows) {
  if (rows.empty()) return "";
  std::vector<std::string> cols;
  for (const auto &[k, v] : rows.front().items())
    if (!v.is_structured()) cols.push_back(k);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto &r : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      out += (i ? "," : "") + (r.contains(cols[i]) ? csv_cell(r.at(cols[i])) : std::string());
    out += "\n";
  }
  return out;
}

json route_row(const SynthesisTree &t, const Catalog &catalog) {
  auto blocks = t.leaves();
  std::sort(blocks.begin(), blocks.end());
  return {{"product", t.key().text},
          {"steps", t.num_internal()},
          {"blocks", blocks},
          {"route", to_sexpr(t, catalog)}};
}

std::vector<json> history_rows(const RunHistory &h, const Catalog &catalog) {
  std::vector<json> rows;
  for (const auto &e : h.entries()) {
    json r {{"call", e.call}, {"fitness", e.fitness}};
    if (!e.tree.empty()) r.update(route_row(e.tree, catalog));
    else r["product"] = e.key.text;
    rows.push_back(std::move(r));
  }
  return rows;
}

json history_summary(const RunHistory &h, std::int64_t budget) {
  std::vector<double> values;
  for (const auto &e : h.entries()) values.push_back(e.fitness);
  json s {{"calls", h.size()}, {"budget", budget}};
  if (values.empty()) return s;
  const auto ranked = h.ranked();
  s["best"] = ranked.front()->fitness;
  s["best_product"] = ranked.front()->key.text;
  s["top1_auc"] = top_k_auc(values, 1, 100, budget);
  s["top10_auc"] = top_k_auc(values, 10, 100, budget);
  s["top10_mean"] = running_top_k_mean(values, values.size(), 10);
  std::vector<chem::CountFingerprint> fps;
  for (std::size_t i = 0; i < ranked.size() && i < 10; ++i)
    if (!ranked[i]->tree.empty())
      fps.push_back(chem::morgan_count_fp(ranked[i]->tree.product(), chem::kMorganRadius,
                                          chem::kSimilarityFingerprintDim));
  if (fps.size() >= 2) s["top10_diversity"] = mean_diversity(fps);
  return s;
}

json catalog_echo(const Inputs &in) {
  return {{"blocks", in.blocks.string()},
          {"templates", in.templates.string()},
          {"size", in.catalog->size()},
          {"num_templates", in.catalog->num_templates()},
          {"digest", std::to_string(in.catalog->digest())}};
}

std::uint64_t seed_of(const json &cfg) { return opt<std::uint64_t>(cfg, "seed", 0); }
int workers_of(const json &cfg) {
  const int w = opt<int>(cfg, "workers", 1);
  if (w < 1) throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
  return w;
}

nn::NamTrainConfig nam_config(const json &j, std::uint64_t seed, int *fingerprint_dim) {
  check_keys(j, "nam option", {"layers", "width", "batch_size", "max_epochs", "patience", "lr",
                               "validation_fraction", "loss", "tie_label", "fingerprint_dim"});
  nn::NamTrainConfig c;
  c.shape.layers = opt<int>(j, "layers", c.shape.layers);
  c.shape.width = opt<int>(j, "width", c.shape.width);
  c.batch_size = opt<int>(j, "batch_size", c.batch_size);
  c.max_epochs = opt<int>(j, "max_epochs", c.max_epochs);
  c.patience = opt<int>(j, "patience", c.patience);
  c.adam.lr = opt<double>(j, "lr", c.adam.lr);
  c.validation_fraction = opt<double>(j, "validation_fraction", c.validation_fraction);
  c.tie_label = opt<double>(j, "tie_label", c.tie_label);
  const std::string loss = opt<std::string>(j, "loss", "ranknet");
  if (loss == "ranknet") c.loss = nn::NamLoss::kRankNet;
  else if (loss == "mse") c.loss = nn::NamLoss::kMse;
  else throw Error(ErrorCode::kInvalidArgument, "NAM loss must be ranknet or mse");
  *fingerprint_dim = opt<int>(j, "fingerprint_dim", chem::kModelFingerprintDim);
  if (*fingerprint_dim < 8 || c.max_epochs < 1 || c.patience < 1)
    throw Error(ErrorCode::kInvalidArgument, "NAM option out of range");
  c.seed = seed;
  return c;
}

// ---- tasks --------------------------------------------------------------------

json blocks_prepare(const json &cfg, const ProgressFn &) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS});
  Inputs in = load_inputs(cfg);
  OutputDir out(cfg, {in.blocks, in.templates});
  std::string smi;
  for (const auto &b : in.catalog->blocks()) smi += b.key.text + " " + std::to_string(b.id) + "\n";
  out.write("blocks.smi", smi);
  in.catalog->save_index(out.path("catalog.idx"));
  json failures = json::array();
  for (const auto &f : in.report.failures)
    failures.push_back({{"line", f.line}, {"text", f.text}, {"message", f.message}});
  json summary = catalog_echo(in);
  summary.update({{"lines", in.report.lines},
                  {"parsed", in.report.parsed},
                  {"duplicates", in.report.duplicates},
                  {"unsupported", in.report.unsupported},
                  {"failures", failures}});
  out.write_json("summary.json", summary);
  return summary;
}

json routes_sample(const json &cfg, const ProgressFn &) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "n", "max_steps", "oracle"});
  Inputs in = load_inputs(cfg);
  OutputDir out(cfg, {in.blocks, in.templates});
  const int n = opt<int>(cfg, "n", 100);
  const int max_steps = opt<int>(cfg, "max_steps", 5);
  if (n < 1 || max_steps < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  OraclePtr oracle;
  if (cfg.contains("oracle")) oracle = make_oracle(cfg.at("oracle"), *in.catalog);
  TreeLimits limits;
  limits.max_internal = max_steps;
  OpContext ctx {*in.catalog, nullptr, limits, 10};
  const std::uint64_t seed = seed_of(cfg);
  std::vector<json> rows;
  std::set<std::string> unique;
  double steps = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, 0x5201, static_cast<std::uint64_t>(i)));
    const SynthesisTree t = sample_route(ctx, rng, max_steps);
    json row {{"index", i}};
    row.update(route_row(t, *in.catalog));
    if (oracle) row["fitness"] = (*oracle)(t);
    unique.insert(t.key().text);
    steps += t.num_internal();
    rows.push_back(std::move(row));
  }
  out.write_jsonl("routes.jsonl", rows);
  json summary {{"routes", n}, {"unique_products", unique.size()}, {"mean_steps", steps / n},
                {"catalog", catalog_echo(in)}};
  if (opt<bool>(cfg, "csv", false)) out.write("routes.csv", to_csv(rows));
  out.write_json("summary.json", summary);
  return summary;
}

json dataset_gen(const json &cfg, const ProgressFn &progress) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "n", "heldout", "max_steps"});
  Inputs in = load_inputs(cfg);
  OutputDir out(cfg, {in.blocks, in.templates});
  DatasetOptions o;
  o.n_products = opt<int>(cfg, "n", o.n_products);
  o.heldout_fraction = opt<double>(cfg, "heldout", o.heldout_fraction);
  o.max_steps = opt<int>(cfg, "max_steps", o.max_steps);
  o.seed = seed_of(cfg);
  if (progress)
    o.progress = [&](int found, std::int64_t attempts) {
      progress("dataset: " + std::to_string(found) + " products after " + std::to_string(attempts) +
               " routes");
    };
  const RouteDataset ds = generate_route_dataset(*in.catalog, o);
  ds.write_jsonl(out.path("dataset.jsonl"));
  double blocks = 0;
  for (const auto &e : ds.examples) blocks += static_cast<double>(e.blocks.size());
  json summary {{"examples", ds.examples.size()},
                {"train", ds.train.size()},
                {"heldout", ds.heldout.size()},
                {"mean_blocks", blocks / static_cast<double>(ds.examples.size())},
                {"catalog", catalog_echo(in)}};
  out.write_json("summary.json", summary);
  return summary;
}

json filter_train(const json &cfg, const ProgressFn &progress) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "dataset", "heldout", "classifier"});
  Inputs in = load_inputs(cfg);
  const fs::path dataset = required_string(cfg, "dataset");
  OutputDir out(cfg, {in.blocks, in.templates, dataset});
  const std::uint64_t seed = seed_of(cfg);
  const RouteDataset ds =
      RouteDataset::read_jsonl(dataset, *in.catalog, opt<double>(cfg, "heldout", 0.1), seed);
  json cj = cfg.contains("classifier") ? cfg.at("classifier") : json::object();
  if (!cj.contains("seed")) cj["seed"] = seed;
  const ClassifierConfig cc = ClassifierConfig::from_json(cj);
  std::vector<json> log;
  const auto res = train_block_classifier(ds, *in.catalog, cc, [&](const ClassifierLog &l) {
    log.push_back({{"step", l.step}, {"loss", l.loss}});
    if (progress) progress("filter: step " + std::to_string(l.step) + " loss " + std::to_string(l.loss));
  });
  res.model.save(out.path("model.bin"), cc.to_json());
  out.write_jsonl("log.jsonl", log);
  json summary {{"auroc", res.heldout.auroc},
                {"auprc", res.heldout.auprc},
                {"heldout_examples", res.heldout.examples},
                {"train_examples", ds.train.size()},
                {"classifier", cc.to_json()},
                {"catalog", catalog_echo(in)}};
  out.write_json("metrics.json", summary);
  return summary;
}

json filter_eval(const json &cfg, const ProgressFn &) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "dataset", "heldout", "model", "split"});
  Inputs in = load_inputs(cfg);
  const fs::path dataset = required_string(cfg, "dataset");
  const fs::path model_path = required_string(cfg, "model");
  OutputDir out(cfg, {in.blocks, in.templates, dataset, model_path});
  const RouteDataset ds = RouteDataset::read_jsonl(dataset, *in.catalog,
                                                   opt<double>(cfg, "heldout", 0.1), seed_of(cfg));
  const BlockClassifier model = BlockClassifier::load(model_path);
  const std::string split = opt<std::string>(cfg, "split", "heldout");
  std::vector<int> idx;
  if (split == "heldout") idx = ds.heldout;
  else if (split == "train") idx = ds.train;
  else if (split == "all") {
    idx.resize(ds.examples.size());
    std::iota(idx.begin(), idx.end(), 0);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "split must be heldout, train or all");
  }
  const auto m = evaluate_classifier(model, ds, *in.catalog, idx);
  json summary {{"auroc", m.auroc}, {"auprc", m.auprc}, {"examples", m.examples}, {"split", split}};
  out.write_json("metrics.json", summary);
  return summary;
}

json nam_train(const json &cfg, const ProgressFn &progress) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "history", "nam", "top_k"});
  Inputs in = load_inputs(cfg);
  const fs::path history = required_string(cfg, "history");
  OutputDir out(cfg, {in.blocks, in.templates, history});
  int dim = 0;
  const nn::NamTrainConfig nc =
      nam_config(cfg.contains("nam") ? cfg.at("nam") : json::object(), seed_of(cfg), &dim);

  std::vector<nn::NamExample> examples;
  std::istringstream lines(read_file(history));
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      nn::NamExample e;
      e.blocks = j.at("blocks").get<std::vector<int>>();
      e.target = j.at("fitness").get<double>();
      for (int b : e.blocks)
        if (b < 0 || b >= in.catalog->size()) throw Error(ErrorCode::kNotFound, "unknown block id");
      examples.push_back(std::move(e));
    } catch (const std::exception &err) {
      throw Error(ErrorCode::kParse, history.string() + " line " + std::to_string(lineno) +
                                         ": expected {\"blocks\": [...], \"fitness\": x} (" +
                                         err.what() + ")");
    }
  }
  const Eigen::MatrixXd fps = block_fingerprint_matrix(*in.catalog, dim);
  std::vector<json> log;
  const auto res = nn::train_nam(examples, fps, nc, [&](const nn::NamEpochLog &l) {
    log.push_back({{"epoch", l.epoch}, {"train_loss", l.train_loss},
                   {"validation_spearman", l.validation_spearman}});
    if (progress)
      progress("nam: epoch " + std::to_string(l.epoch) + " spearman " +
               std::to_string(l.validation_spearman));
  });
  const int top_k = opt<int>(cfg, "top_k", 1000);
  const json echo {{"layers", nc.shape.layers}, {"width", nc.shape.width},
                   {"fingerprint_dim", dim}, {"examples", examples.size()}};
  save_nam(res.model, dim, out.path("nam.bin"), echo);
  out.write_jsonl("log.jsonl", log);
  const Eigen::VectorXd scores = res.model.block_scores(fps);
  std::vector<json> blocks;
  for (int id : nam_top_k_filter(res.model, fps, top_k))
    blocks.push_back({{"id", id}, {"smiles", in.catalog->block(id).key.text}, {"score", scores[id]}});
  std::stable_sort(blocks.begin(), blocks.end(), [](const json &a, const json &b) {
    return a.at("score").get<double>() > b.at("score").get<double>();
  });
  out.write_jsonl("top_blocks.jsonl", blocks);
  json summary {{"examples", examples.size()},
                {"skipped", res.skipped},
                {"best_validation_spearman", res.best_validation_spearman},
                {"best_epoch", res.best_epoch},
                {"alpha", res.model.alpha()},
                {"top_k", blocks.size()},
                {"catalog", catalog_echo(in)}};
  out.write_json("summary.json", summary);
  return summary;
}

GaConfig ga_config(const json &cfg, GaConfig base) {
  GaConfig c = GaConfig::from_json(cfg.contains("ga") ? cfg.at("ga") : json::object(), base);
  c.seed = seed_of(cfg);
  c.workers = workers_of(cfg);
  c.validate();
  return c;
}

std::vector<json> population_rows(const std::vector<RouteRecord> &pop, const Catalog &catalog,
                                  std::size_t limit) {
  std::vector<json> rows;
  for (std::size_t i = 0; i < pop.size() && i < limit; ++i) {
    json r {{"rank", i + 1}, {"fitness", pop[i].fitness}, {"call", pop[i].discovered}};
    r.update(route_row(pop[i].tree, catalog));
    rows.push_back(std::move(r));
  }
  return rows;
}

GaHooks progress_hooks(const ProgressFn &progress, const char *label) {
  GaHooks h;
  if (progress)
    h.on_generation = [progress, label](const GenerationStats &s) {
      if (s.generation % 50 != 0) return;
      std::ostringstream msg;
      msg << label << ": generation " << s.generation << " calls " << s.evaluated << " best "
          << s.best << " top10 " << s.mean_top10;
      progress(msg.str());
    };
  return h;
}

json ga_run(const json &cfg, const ProgressFn &progress) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "oracle", "ga", "filter"});
  Inputs in = load_inputs(cfg);
  OutputDir out(cfg, {in.blocks, in.templates});
  if (!cfg.contains("oracle")) throw Error(ErrorCode::kInvalidArgument, "missing required 'oracle'");
  const OraclePtr oracle = make_oracle(cfg.at("oracle"), *in.catalog);
  const GaConfig gc = ga_config(cfg, GaConfig());
  const auto filter =
      build_filter(cfg.contains("filter") ? cfg.at("filter") : json::object(), *in.catalog);
  const GaResult res = run_synga(gc, oracle->as_fitness(), *in.catalog,
                                 filter ? &*filter : nullptr, progress_hooks(progress, "ga"));
  const auto rows = history_rows(res.history, *in.catalog);
  out.write_jsonl("history.jsonl", rows);
  out.write_jsonl("population.jsonl", population_rows(res.population, *in.catalog, 100));
  json summary = history_summary(res.history, gc.budget);
  summary.update({{"oracle", oracle->name()},
                  {"oracle_calls", oracle->calls()},
                  {"generations", res.generations},
                  {"stalled", res.stalled},
                  {"filter_size", filter ? static_cast<int>(filter->ids.size()) : 0},
                  {"ga", gc.to_json()},
                  {"catalog", catalog_echo(in)}});
  if (opt<bool>(cfg, "csv", false)) out.write("history.csv", to_csv(rows));
  out.write_json("summary.json", summary);
  return summary;
}

json gbo_run(const json &cfg, const ProgressFn &progress) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "oracle", "gbo", "preset"});
  Inputs in = load_inputs(cfg);
  OutputDir out(cfg, {in.blocks, in.templates});
  if (!cfg.contains("oracle")) throw Error(ErrorCode::kInvalidArgument, "missing required 'oracle'");
  const OraclePtr oracle = make_oracle(cfg.at("oracle"), *in.catalog);
  const std::string preset = opt<std::string>(cfg, "preset", "desk");
  GboConfig base;
  if (preset == "desk") base = GboConfig::desk();
  else if (preset != "full") throw Error(ErrorCode::kInvalidArgument, "preset must be desk or full");
  GboConfig gc = GboConfig::from_json(cfg.contains("gbo") ? cfg.at("gbo") : json::object(), base);
  gc.seed = seed_of(cfg);
  gc.workers = workers_of(cfg);
  std::vector<json> iterations;
  GboHooks hooks;
  hooks.on_iteration = [&](const GboIteration &it) {
    iterations.push_back({{"iteration", it.iteration},
                          {"beta", it.beta},
                          {"filter_size", it.filter_size},
                          {"nam_refit", it.nam_refit},
                          {"gp_size", it.gp_size},
                          {"gp_jitter", it.gp_jitter},
                          {"best_acquisition", it.best_acquisition},
                          {"inner_candidates", it.inner_candidates},
                          {"refilled", it.refilled},
                          {"evaluated", it.evaluated}});
    if (progress && it.iteration % 10 == 0) {
      std::ostringstream msg;
      msg << "gbo: iteration " << it.iteration << " beta " << it.beta << " gp " << it.gp_size
          << " filter " << it.filter_size;
      progress(msg.str());
    }
  };
  const GboResult res = run_syngbo(gc, oracle->as_fitness(), *in.catalog, hooks);
  const auto rows = history_rows(res.history, *in.catalog);
  out.write_jsonl("history.jsonl", rows);
  out.write_jsonl("iterations.jsonl", iterations);
  json summary = history_summary(res.history, gc.budget);
  summary.update({{"oracle", oracle->name()},
                  {"oracle_calls", oracle->calls()},
                  {"iterations", res.iterations.size()},
                  {"stalled", res.stalled},
                  {"preset", preset},
                  {"gbo", gc.to_json()},
                  {"catalog", catalog_echo(in)}});
  if (opt<bool>(cfg, "csv", false)) out.write("history.csv", to_csv(rows));
  out.write_json("summary.json", summary);
  return summary;
}

// Desk-scale analog search: budget 1000 with half of it spent on the
// initial population.
GaConfig analog_defaults() {
  GaConfig c;
  c.budget = 1000;
  c.initial_size = 500;
  c.population_size = 500;
  return c;
}

json analog_search(const json &cfg, const ProgressFn &progress) {
  check_keys(cfg, "config", {SYNROUTE_COMMON_KEYS, "query", "ga", "filter", "top"});
  Inputs in = load_inputs(cfg);
  OutputDir out(cfg, {in.blocks, in.templates});
  const std::string query_smiles = required_string(cfg, "query");
  const chem::Molecule query = chem::parse_smiles(query_smiles);
  const OraclePtr oracle = make_analog_oracle(query);
  const GaConfig gc = ga_config(cfg, analog_defaults());
  const auto filter =
      build_filter(cfg.contains("filter") ? cfg.at("filter") : json::object(), *in.catalog, &query);
  const GaResult res = run_synga(gc, oracle->as_fitness(), *in.catalog,
                                 filter ? &*filter : nullptr, progress_hooks(progress, "analog"));
  const auto qfp =
      chem::morgan_count_fp(query, chem::kMorganRadius, chem::kSimilarityFingerprintDim);
  auto rows = population_rows(res.population, *in.catalog,
                              static_cast<std::size_t>(opt<int>(cfg, "top", 100)));
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i]["similarity"] = chem::tanimoto(
        qfp, chem::morgan_count_fp(res.population[i].tree.product(), chem::kMorganRadius,
                                   chem::kSimilarityFingerprintDim));
  out.write_jsonl("analogs.jsonl", rows);
  json summary = history_summary(res.history, gc.budget);
  summary.update({{"query", chem::canonical_key(query).text},
                  {"oracle", oracle->name()},
                  {"oracle_calls", oracle->calls()},
                  {"generations", res.generations},
                  {"filter", filter ? filter_kind_name(filter->kind) : "none"},
                  {"filter_size", filter ? static_cast<int>(filter->ids.size()) : 0},
                  {"ga", gc.to_json()},
                  {"catalog", catalog_echo(in)}});
  if (opt<bool>(cfg, "csv", false)) out.write("analogs.csv", to_csv(rows));
  out.write_json("summary.json", summary);
  return summary;
}

json report(const json &cfg, const ProgressFn &) {
  check_keys(cfg, "config", {"out", "force", "runs", "csv", "seed", "workers"});
  if (!cfg.contains("runs") || !cfg.at("runs").is_array() || cfg.at("runs").empty())
    throw Error(ErrorCode::kInvalidArgument, "report needs a nonempty 'runs' list");
  std::vector<fs::path> runs;
  for (const auto &r : cfg.at("runs")) runs.emplace_back(r.get<std::string>());
  std::vector<fs::path> inputs;
  for (const auto &r : runs) {
    inputs.push_back(r / "manifest.json");
    inputs.push_back(r / "summary.json");
  }
  OutputDir out(cfg, inputs);
  std::vector<json> rows;
  std::map<std::string, std::vector<double>> groups;
  for (const auto &r : runs) {
    const fs::path mpath = r / "manifest.json";
    if (!fs::exists(mpath)) throw Error(ErrorCode::kIo, "no manifest in run directory " + r.string());
    const json manifest = json::parse(read_file(mpath));
    const fs::path spath = r / "summary.json";
    const json summary = fs::exists(spath) ? json::parse(read_file(spath)) : json::object();
    json row {{"run", r.string()},
              {"command", manifest.value("command", "")},
              {"seed", manifest.value("seed", 0)}};
    for (const char *k : {"oracle", "filter", "calls", "best", "best_product", "top1_auc",
                          "top10_auc", "top10_diversity", "auroc", "auprc",
                          "best_validation_spearman"})
      if (summary.contains(k)) row[k] = summary.at(k);
    if (summary.contains("top10_auc"))
      groups[row.at("command").get<std::string>() + " " + summary.value("oracle", "")].push_back(
          summary.at("top10_auc").get<double>());
    rows.push_back(std::move(row));
  }
  std::vector<json> table;
  for (const auto &[key, vals] : groups) {
    double mean = 0, var = 0;
    for (double v : vals) mean += v / static_cast<double>(vals.size());
    for (double v : vals) var += (v - mean) * (v - mean) / static_cast<double>(vals.size());
    table.push_back({{"group", key}, {"runs", vals.size()}, {"top10_auc_mean", mean},
                     {"top10_auc_std", std::sqrt(var)}});
  }
  json summary {{"runs", rows}, {"groups", table}};
  out.write_json("report.json", summary);
  if (opt<bool>(cfg, "csv", false)) {
    out.write("report.csv", to_csv(rows));
    if (!table.empty()) out.write("groups.csv", to_csv(table));
  }
  return summary;
}

json library_versions() {
  return {{"synroute", SYNROUTE_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace

std::optional<BlockFilter> build_filter(const json &spec, const Catalog &catalog,
                                        const chem::Molecule *query) {
  if (spec.is_null() || spec.empty()) return std::nullopt;
  check_keys(spec, "filter", {"kind", "epsilon", "threshold", "model", "mu", "k", "query"});
  const std::string kind = opt<std::string>(spec, "kind", "none");
  if (kind == "none") return std::nullopt;
  const double epsilon = opt<double>(spec, "epsilon", 0.1);
  std::optional<chem::Molecule> own_query;
  if (spec.contains("query")) own_query = chem::parse_smiles(spec.at("query").get<std::string>());
  const chem::Molecule *q = own_query ? &*own_query : query;
  auto need_query = [&] {
    if (!q) throw Error(ErrorCode::kInvalidArgument, kind + " filter needs a query molecule");
  };
  if (kind == "sim") {
    need_query();
    const auto fp = chem::morgan_count_fp(*q, chem::kMorganRadius, catalog.fingerprint_dim());
    return BlockFilter::from_ids(sim_filter(fp, catalog, opt<double>(spec, "threshold", 0.5)),
                                 epsilon, FilterKind::kSim);
  }
  if (kind == "classifier" || kind == "mlp") {
    need_query();
    const auto model = BlockClassifier::load(required_string(spec, "model"));
    return BlockFilter::from_ids(classifier_filter(model, *q, catalog, opt<double>(spec, "mu", 0.5)),
                                 epsilon, FilterKind::kClassifier);
  }
  if (kind == "nam") {
    int dim = 0;
    const auto nam = load_nam(required_string(spec, "model"), &dim);
    return BlockFilter::from_ids(
        nam_top_k_filter(nam, block_fingerprint_matrix(catalog, dim), opt<int>(spec, "k", 1000)),
        epsilon, FilterKind::kNam);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown filter kind '" + kind + "'");
}

json run_task(const std::string &task, const json &config, const ProgressFn &progress) {
  json cfg = config;
  if (cfg.is_object() && cfg.contains("manifest_version")) {
    if (cfg.value("command", "") != task)
      throw Error(ErrorCode::kInvalidArgument,
                  "manifest is for '" + cfg.value("command", "") + "', not '" + task + "'");
    // Rerun of a recorded run; output placement comes from the caller.
    json inner = cfg.at("config");
    for (const char *k : {"out", "force"})
      if (cfg.contains(k)) inner[k] = cfg.at(k);
    cfg = std::move(inner);
  }
  if (!cfg.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");

  using Fn = json (*)(const json &, const ProgressFn &);
  static const std::map<std::string, Fn> dispatch {
      {"blocks.prepare", blocks_prepare}, {"routes.sample", routes_sample},
      {"dataset.gen", dataset_gen},       {"filter.train", filter_train},
      {"filter.eval", filter_eval},       {"nam.train", nam_train},
      {"ga.run", ga_run},                 {"gbo.run", gbo_run},
      {"analog.search", analog_search},   {"report", report}};
  const auto it = dispatch.find(task);
  if (it == dispatch.end()) throw Error(ErrorCode::kInvalidArgument, "unknown task '" + task + "'");

  const auto start = std::chrono::steady_clock::now();
  json summary = it->second(cfg, progress);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json echo = cfg;
  echo.erase("out");
  echo.erase("force");
  std::vector<std::string> outputs;
  const fs::path dir = cfg.at("out").get<std::string>();
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      outputs.push_back(e.path().filename().string());
  std::sort(outputs.begin(), outputs.end());
  const json manifest {{"manifest_version", 1},
                       {"command", task},
                       {"config", echo},
                       {"seed", seed_of(cfg)},
                       {"workers", opt<int>(cfg, "workers", 1)},
                       {"versions", library_versions()},
                       {"wall_time_s", wall},
                       {"outputs", outputs}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace synroute
