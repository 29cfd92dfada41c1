#include "avgkernel/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "avgkernel/error.hpp"

namespace avgkernel {

namespace {

const double kUpper = std::ldexp(1.0, 512);
const double kLower = std::ldexp(1.0, -512);

void check_arguments(int k, double x) {
  if (k < 0) throw ValidationError("Laguerre order must be non-negative, got " + std::to_string(k));
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("Laguerre argument must be finite and >= 0, got " + std::to_string(x));
}

}  // namespace

ScaledValue ScaledValue::from_parts(double value, std::int64_t exponent) {
  if (value == 0.0) return {};
  int e = 0;
  const double m = std::frexp(value, &e);  // |m| in [0.5, 1)
  return {2.0 * m, exponent + e - 1};
}

double ScaledValue::to_double() const {
  if (mantissa == 0.0) return 0.0;
  constexpr std::int64_t kClamp = 1 << 20;
  return std::ldexp(mantissa, static_cast<int>(std::clamp(exponent, -kClamp, kClamp)));
}

double ScaledValue::log_abs() const {
  if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa)) + static_cast<double>(exponent) * std::numbers::ln2;
}

double laguerre_eval(int k, double x) {
  check_arguments(k, x);
  if (k == 0) return 1.0;
  double previous = 1.0;
  double current = 1.0 - x;
  for (int n = 1; n < k; ++n) {
    const double next = ((2.0 * n + 1.0 - x) * current - n * previous) / (n + 1.0);
    previous = current;
    current = next;
  }
  return current;
}

ScaledPair laguerre_pair_scaled(int k, double x) {
  check_arguments(k, x);
  ScaledPair pair;
  if (k == 0) return pair;
  pair.previous = 1.0;
  pair.current = 1.0 - x;
  for (int n = 1; n < k; ++n) {
    const double next = ((2.0 * n + 1.0 - x) * pair.current - n * pair.previous) / (n + 1.0);
    pair.previous = pair.current;
    pair.current = next;
    const double magnitude = std::max(std::abs(pair.current), std::abs(pair.previous));
    if (magnitude > kUpper || (magnitude < kLower && magnitude != 0.0)) {
      int e = 0;
      std::frexp(magnitude, &e);
      pair.current = std::ldexp(pair.current, -e);
      pair.previous = std::ldexp(pair.previous, -e);
      pair.exponent += e;
    }
  }
  return pair;
}

ScaledValue laguerre_eval_scaled(int k, double x) {
  const ScaledPair pair = laguerre_pair_scaled(k, x);
  return ScaledValue::from_parts(pair.current, pair.exponent);
}

double laguerre_derivative(int k, double x) {
  return laguerre_derivative_scaled(k, x).to_double();
}

ScaledValue laguerre_derivative_scaled(int k, double x) {
  if (!(x > 0.0)) throw DomainError("Laguerre derivative requires x > 0, got " + std::to_string(x));
  if (k == 0) return {};
  const ScaledPair pair = laguerre_pair_scaled(k, x);
  return ScaledValue::from_parts(k * (pair.current - pair.previous) / x, pair.exponent);
}

}  // namespace avgkernel
