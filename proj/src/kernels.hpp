#pragma once

// Arithmetic kernels shared by the tree evaluator, the compiled evaluator and
// constant folding so that all three agree bit for bit.

#include <cmath>
#include <string>

#include "rfeas/error.hpp"
#include "rfeas/format.hpp"

namespace rfeas::detail {

inline constexpr double kDivisionGuard = 1e-300;
inline constexpr double kIntegerExponentTol = 1e-9;

inline double checked(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteResult, "expression evaluated to a non-finite value");
  }
  return v;
}

inline double k_div(double a, double b) {
  if (std::fabs(b) < kDivisionGuard) {
    throw Error(ErrorCode::DivisionByZero, "division by zero (|divisor| < 1e-300)");
  }
  return checked(a / b);
}

inline double k_sqrt(double a) {
  if (a < 0.0) {
    throw Error(ErrorCode::Domain, "sqrt of negative value " + format_double(a));
  }
  return std::sqrt(a);
}

inline double k_pow(double base, double exponent) {
  const double rounded = std::round(exponent);
  if (std::fabs(exponent - rounded) < kIntegerExponentTol) {
    long long n = static_cast<long long>(rounded);
    const bool invert = n < 0;
    if (invert) n = -n;
    double result = 1.0;
    if (n > 0) {
      result = base;
      for (long long i = 1; i < n; ++i) {
        result *= base;
        if (!std::isfinite(result) || result == 0.0) break;
      }
    }
    checked(result);
    return invert ? k_div(1.0, result) : result;
  }
  if (base < 0.0) {
    throw Error(ErrorCode::Domain, "non-integer power of negative base " + format_double(base));
  }
  return checked(std::pow(base, exponent));
}

}  // namespace rfeas::detail
