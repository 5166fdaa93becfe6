//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNROUTE_ERROR_H_
#define SYNROUTE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synroute {

enum class ErrorCode {
  kInvalidArgument = 1,
  kParse,
  kValence,
  kIo,
  kNotFound,
  kNumeric,
  kExists,
  kInternal,
};

const char *error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) { }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string &what)
      : Error(ErrorCode::kParse, what + " at offset " + std::to_string(position)),
        position_(position) { }

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

}  // namespace synroute

#endif  // SYNROUTE_ERROR_H_
