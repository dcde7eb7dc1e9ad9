#pragma once

#include <stdexcept>
#include <string>

namespace advhopf {

enum class ErrorCode {
  InvalidArgument,
  ConfigError,
  IoError,
  PositivityViolation,
  NoConvergence,
  NonPositiveRoot,
  BracketFailure,
  QuadratureNotConverged,
  InconsistentTrig,
  DegenerateCrossing,
  SingularNormalization,
  SingularL,
  ZeroTransversality,
  TransversalityMismatch,
  CflViolation,
  NonFiniteField,
  Inconclusive,
  S1Violation,
};

const char* to_string(ErrorCode code) noexcept;

/// True for failures that originate in the numerics rather than in the input.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace advhopf
