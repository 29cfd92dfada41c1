#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avgkernel/tensor_quad.hpp"

namespace avgkernel {

/// eps_n = |Q_{n+1,n+1} - Q_{n,n}|, indexed by the lower order n.
struct ErrorPoint {
  int order = 0;
  double error = 0.0;
};

/// Inclusive range of error-sequence orders used for the slope fit.
struct FitWindow {
  int first = 0;
  int last = 0;
};

enum class RemainderStatus {
  estimated,          ///< slope < -1, remainder is the extrapolated tail
  converged_exactly,  ///< error sequence is zero to round-off, remainder is 0
  divergent_tail,     ///< slope >= -1, no estimate exists (remainder is NaN)
};

struct RemainderEstimate {
  int anchor_order = 0;
  double anchor_error = 0.0;
  double slope = 0.0;
  double remainder = 0.0;
  FitWindow fit_window;
  RemainderStatus status = RemainderStatus::estimated;

  bool has_estimate() const { return status != RemainderStatus::divergent_tail; }
};

/// Final series value with its extrapolated uncertainty, one Table-2 style row.
struct Report {
  std::string integrand_id;
  int k_max = 0;
  double value = 0.0;
  RemainderEstimate remainder;

  /// "II = 6.8370 ± 0.0002"; decimals apply to both numbers.
  std::string summary(int decimals = 4) const;
};

std::vector<ErrorPoint> error_sequence(const ConvergenceSeries& series);

/// Least-squares slope of ln eps against ln n over the window, skipping
/// eps = 0 entries. Throws DegenerateFitError with fewer than two usable points.
double fit_slope(std::span<const ErrorPoint> errors, FitWindow window);

/// Tail integral of eps_n (x/n)^C over [n+1, inf):
/// R = -eps_n ((n+1)/n)^C (n+1)/(C+1). Throws DivergentTailError for C >= -1.
double remainder_estimate(double eps_n, double slope, int n);

/// Last half of the error sequence: [ceil(k_max/2), k_max-1].
FitWindow default_fit_window(int k_max);

/// Error sequence, slope over the window (default: last half), remainder
/// anchored at the largest n. Needs at least 20 series entries.
Report full_report(const ConvergenceSeries& series, std::optional<FitWindow> window = std::nullopt);

}  // namespace avgkernel
