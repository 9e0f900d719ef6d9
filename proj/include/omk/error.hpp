#pragma once

#include <stdexcept>
#include <string>

namespace omk {

enum class ErrorCode {
  invalid_argument = 1,
  domain,
  window_mismatch,
  pole_on_grid,
  truncation,
  memory_budget,
  convergence,
  numeric,
  config,
  io,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace omk
