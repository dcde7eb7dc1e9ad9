#include "advhopf/error.hpp"

namespace advhopf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPositiveRoot: return "NonPositiveRoot";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::InconsistentTrig: return "InconsistentTrig";
    case ErrorCode::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorCode::SingularNormalization: return "SingularNormalization";
    case ErrorCode::SingularL: return "SingularL";
    case ErrorCode::ZeroTransversality: return "ZeroTransversality";
    case ErrorCode::TransversalityMismatch: return "TransversalityMismatch";
    case ErrorCode::CflViolation: return "CFLViolation";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::S1Violation: return "S1Violation";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
      return false;
    default:
      return true;
  }
}

}  // namespace advhopf
