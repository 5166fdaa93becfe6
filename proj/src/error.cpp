//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synroute/error.h"

namespace synroute {

const char *error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::kInvalidArgument:
    return "invalid_argument";
  case ErrorCode::kParse:
    return "parse_error";
  case ErrorCode::kValence:
    return "valence_error";
  case ErrorCode::kIo:
    return "io_error";
  case ErrorCode::kNotFound:
    return "not_found";
  case ErrorCode::kNumeric:
    return "numeric_error";
  case ErrorCode::kExists:
    return "already_exists";
  case ErrorCode::kInternal:
    return "internal_error";
  }
  return "unknown";
}

}  // namespace synroute
