#pragma once

#include <cstdint>

namespace avgkernel {

/// A real number stored as mantissa * 2^exponent with |mantissa| in [1, 2),
/// or the exact zero (mantissa 0, exponent 0). Used for Laguerre values whose
/// magnitude leaves the range of double.
struct ScaledValue {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  /// Normalizes value * 2^exponent.
  static ScaledValue from_parts(double value, std::int64_t exponent);

  /// Unscaled value; overflows to +-inf or underflows to 0 when out of range.
  double to_double() const;
  /// Natural log of the magnitude (-inf for zero).
  double log_abs() const;
  int sign() const { return (mantissa > 0.0) - (mantissa < 0.0); }
};

/// L_k(x) and L_{k-1}(x) sharing one power-of-two scale:
/// L_k = current * 2^exponent, L_{k-1} = previous * 2^exponent.
/// The pair is what Newton iteration needs, since L_k / L_k' only depends on
/// the ratio of the two.
struct ScaledPair {
  double current = 1.0;
  double previous = 0.0;
  std::int64_t exponent = 0;
};

/// Three-term recurrence in plain double arithmetic.
double laguerre_eval(int k, double x);

/// Overflow-safe recurrence. Running terms are renormalized by an exact power
/// of two whenever their magnitude leaves [2^-512, 2^512].
ScaledPair laguerre_pair_scaled(int k, double x);
ScaledValue laguerre_eval_scaled(int k, double x);

/// L_k'(x) from x L_k'(x) = k (L_k(x) - L_{k-1}(x)). Throws DomainError at x <= 0.
double laguerre_derivative(int k, double x);
ScaledValue laguerre_derivative_scaled(int k, double x);

}  // namespace avgkernel
