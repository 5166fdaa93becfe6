//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_TESTS_TOY_CATALOG_H_
#define SYNROUTE_TESTS_TOY_CATALOG_H_

#include <string>

#include "synroute/catalog.h"

namespace synroute::testing {

inline std::string data_path(const std::string &name) {
  return std::string(SYNROUTE_DATA_DIR) + "/" + name;
}

inline std::vector<chem::ReactionTemplate> toy_templates() {
  return chem::load_templates(data_path("templates.tsv"));
}

// Loaded once per test binary.
inline const Catalog &toy_catalog() {
  static const CatalogPtr catalog =
      Catalog::load(data_path("toy_blocks.smi"), toy_templates());
  return *catalog;
}

}  // namespace synroute::testing

#endif  // SYNROUTE_TESTS_TOY_CATALOG_H_
