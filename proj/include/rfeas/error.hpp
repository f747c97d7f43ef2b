#pragma once

#include <stdexcept>
#include <string>

namespace rfeas {

// Values are shared with the C API status codes in rfeas.h.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  Syntax = 2,
  DuplicateVariable = 3,
  UnknownVariable = 4,
  AlphaOutOfRange = 5,
  MissingBounds = 6,
  InvalidBounds = 7,
  InvalidProblem = 8,
  UnboundVariable = 9,
  DivisionByZero = 10,
  Domain = 11,
  NonFiniteResult = 12,
  NonFiniteInput = 13,
  HasControlVariables = 14,
  NoControlVariables = 15,
  NoFeasibleSamples = 16,
  NoConvergence = 17,
  DimensionMismatch = 18,
  UnknownBuiltin = 19,
  Io = 20,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A parse failure. Line and column are 1-based and point inside the
/// offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(ErrorCode::Syntax, "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace rfeas
