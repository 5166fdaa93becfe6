//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_IO_H_
#define SYNROUTE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace synroute {

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

std::string read_file(const std::filesystem::path &path);

}  // namespace synroute

#endif  // SYNROUTE_IO_H_
