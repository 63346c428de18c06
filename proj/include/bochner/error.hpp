#pragma once

#include <stdexcept>
#include <string>

namespace bochner {

enum class ErrorCode {
  invalid_spec,
  empty_target,
  positivity_violation,
  quantization,
  unsupported_gauge,
  bundle_inconsistency,
  consistency,
  overflow,
  invalid_input,
  degeneracy,
  empty_region,
  invalid_window,
  empty_set,
  size,
  flag,
  convergence,
  factorization,
  invalid_rate,
  insufficient_data,
  support,
  invalid_data,
  invalid_config,
  io,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers (and tests) distinguish failure classes without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bochner
