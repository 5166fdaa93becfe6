//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/synroute_c.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "synroute/chem/smiles.h"
#include "synroute/error.h"
#include "synroute/synthesis.h"
#include "synroute/tasks.h"

struct synroute_catalog {
  std::shared_ptr<const synroute::Catalog> catalog;
  synroute::LoadReport report;
};

namespace {

thread_local std::string last_error;

char *dup(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
synroute_status guarded(F &&body) {
  try {
    last_error.clear();
    body();
    return SYNROUTE_OK;
  } catch (const synroute::Error &e) {
    last_error = e.what();
    return static_cast<synroute_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception &e) {
    last_error = std::string("invalid JSON: ") + e.what();
    return SYNROUTE_E_INVALID_ARGUMENT;
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return SYNROUTE_E_INTERNAL;
  } catch (const std::exception &e) {
    last_error = e.what();
    return SYNROUTE_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SYNROUTE_E_INTERNAL;
  }
}

void require(bool ok, const char *what) {
  if (!ok) throw synroute::Error(synroute::ErrorCode::kInvalidArgument, what);
}

nlohmann::json parse_json(const char *text) {
  if (!text || !*text) return nlohmann::json::object();
  return nlohmann::json::parse(text);
}

}  // namespace

extern "C" {

const char *synroute_version(void) { return SYNROUTE_VERSION; }

const char *synroute_status_name(synroute_status status) {
  if (status == SYNROUTE_OK) return "ok";
  if (status < SYNROUTE_E_INVALID_ARGUMENT || status > SYNROUTE_E_INTERNAL) return "unknown";
  return synroute::error_code_name(static_cast<synroute::ErrorCode>(status));
}

const char *synroute_last_error(void) { return last_error.c_str(); }

void synroute_string_free(char *s) { std::free(s); }

synroute_status synroute_canonicalize(const char *smiles, char **out) {
  return guarded([&] {
    require(smiles && out, "null argument");
    *out = dup(synroute::chem::canonical_key(synroute::chem::parse_smiles(smiles)).text);
  });
}

synroute_status synroute_catalog_load(const char *blocks_path, const char *templates_path,
                                      const char *options_json, synroute_catalog **out) {
  return guarded([&] {
    require(blocks_path && templates_path && out, "null argument");
    *out = nullptr;
    const auto opts = parse_json(options_json);
    synroute::CatalogOptions options;
    for (const auto &[k, v] : opts.items()) {
      if (k == "strict") options.strict = v.get<bool>();
      else if (k == "fingerprint_dim") options.fingerprint_dim = v.get<int>();
      else throw synroute::Error(synroute::ErrorCode::kInvalidArgument, "unknown catalog option '" + k + "'");
    }
    auto handle = std::make_unique<synroute_catalog>();
    handle->catalog = synroute::Catalog::load(
        blocks_path, synroute::chem::load_templates(templates_path), options, &handle->report);
    *out = handle.release();
  });
}

void synroute_catalog_free(synroute_catalog *catalog) { delete catalog; }

int32_t synroute_catalog_size(const synroute_catalog *catalog) {
  return catalog ? catalog->catalog->size() : 0;
}

synroute_status synroute_catalog_info(const synroute_catalog *catalog, char **json) {
  return guarded([&] {
    require(catalog && json, "null argument");
    const auto &c = *catalog->catalog;
    const auto &r = catalog->report;
    const nlohmann::json info {{"size", c.size()},
                               {"templates", c.num_templates()},
                               {"digest", std::to_string(c.digest())},
                               {"lines", r.lines},
                               {"parsed", r.parsed},
                               {"duplicates", r.duplicates},
                               {"unsupported", r.unsupported},
                               {"failures", r.failures.size()}};
    *json = dup(info.dump());
  });
}

synroute_status synroute_sample_route(const synroute_catalog *catalog, uint64_t seed,
                                      int32_t max_steps, char **route_json) {
  return guarded([&] {
    require(catalog && route_json, "null argument");
    require(max_steps >= 0, "max_steps must be >= 0");
    synroute::TreeLimits limits;
    limits.max_internal = max_steps;
    synroute::OpContext ctx {*catalog->catalog, nullptr, limits, 10};
    synroute::Rng rng(seed);
    const auto t = synroute::sample_route(ctx, rng, max_steps);
    const nlohmann::json j {{"product", t.key().text},
                            {"route", synroute::to_sexpr(t, *catalog->catalog)},
                            {"blocks", t.leaves()},
                            {"steps", t.num_internal()}};
    *route_json = dup(j.dump());
  });
}

synroute_status synroute_validate_route(const synroute_catalog *catalog, const char *route,
                                        int32_t *valid) {
  return guarded([&] {
    require(catalog && route && valid, "null argument");
    *valid = 0;
    const auto t = synroute::from_sexpr(route, *catalog->catalog);
    *valid = synroute::validate_tree(t, *catalog->catalog) ? 0 : 1;
  });
}

synroute_status synroute_task_names(char **json) {
  return guarded([&] {
    require(json, "null argument");
    *json = dup(nlohmann::json(synroute::task_names()).dump());
  });
}

synroute_status synroute_run_task(const char *task, const char *config_json,
                                  synroute_progress_fn progress, void *user,
                                  char **summary_json) {
  return guarded([&] {
    require(task && config_json, "null argument");
    synroute::ProgressFn fn;
    if (progress) fn = [progress, user](const std::string &line) { progress(line.c_str(), user); };
    const auto summary = synroute::run_task(task, nlohmann::json::parse(config_json), fn);
    if (summary_json) *summary_json = dup(summary.dump());
  });
}

}  // extern "C"
