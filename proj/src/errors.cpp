#include "rfeas/error.hpp"

namespace rfeas {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Syntax: return "Syntax";
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::MissingBounds: return "MissingBounds";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::HasControlVariables: return "HasControlVariables";
    case ErrorCode::NoControlVariables: return "NoControlVariables";
    case ErrorCode::NoFeasibleSamples: return "NoFeasibleSamples";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace rfeas
