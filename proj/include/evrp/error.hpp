#pragma once

#include <stdexcept>
#include <string>

namespace evrp {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  no_initial_solution,
  generation_failed,
  parse_error,
  unsupported_version,
  too_large,
  no_solution_found,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evrp
