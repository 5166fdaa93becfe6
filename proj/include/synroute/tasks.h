//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_TASKS_H_
#define SYNROUTE_TASKS_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "synroute/catalog.h"
#include "synroute/chem/molecule.h"
#include "synroute/filter.h"

#define SYNROUTE_VERSION "0.1.0"

namespace synroute {

using ProgressFn = std::function<void(const std::string &)>;

// Task names: blocks.prepare, routes.sample, dataset.gen, filter.train,
// filter.eval, nam.train, ga.run, gbo.run, analog.search, report.
const std::vector<std::string> &task_names();

// Runs a task from its JSON config and writes its outputs (JSONL/JSON files
// plus manifest.json) into config["out"]. A manifest written by an earlier
// run may be passed as the config. Returns the run summary.
//
// Unknown config keys throw kInvalidArgument; a nonempty output directory
// throws kExists unless config["force"] is true.
nlohmann::json run_task(const std::string &task, const nlohmann::json &config,
                        const ProgressFn &progress = {});

// $SYNROUTE_DATA_DIR, else the data directory this library was built with.
std::filesystem::path default_data_dir();

// Filter spec: {"kind": "none" | "sim" | "classifier" | "nam", "epsilon": 0.1,
// "threshold": 0.5, "model": path, "mu": 0.5, "k": 1000, "query": SMILES}.
// `query` is used by sim and classifier filters when the spec has none.
std::optional<BlockFilter> build_filter(const nlohmann::json &spec, const Catalog &catalog,
                                        const chem::Molecule *query = nullptr);

}  // namespace synroute

#endif  // SYNROUTE_TASKS_H_
