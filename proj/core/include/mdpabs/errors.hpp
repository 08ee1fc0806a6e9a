#pragma once

#include <stdexcept>
#include <string>

namespace mdpabs {

enum class ErrorCode {
  invalid_parameter,
  invalid_state,
  input_not_in_set,
  unsatisfiable,
  insufficient_samples,
  solver_failure,
  invalid_interval,
  incompatible_file,
  config_error,
  io_error,
};

const char* error_code_name(ErrorCode code);

/// All library errors carry a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw_error(code, message);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "InvalidParameter";
    case ErrorCode::invalid_state: return "InvalidState";
    case ErrorCode::input_not_in_set: return "InputNotInSet";
    case ErrorCode::unsatisfiable: return "Unsatisfiable";
    case ErrorCode::insufficient_samples: return "InsufficientSamples";
    case ErrorCode::solver_failure: return "SolverFailure";
    case ErrorCode::invalid_interval: return "InvalidInterval";
    case ErrorCode::incompatible_file: return "IncompatibleFile";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Error";
}

}  // namespace mdpabs
