#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "avgkernel/extrapolate.hpp"
#include "avgkernel/kernels.hpp"

namespace avgkernel {

/// p = Q/2 of the symmetric full-plane double integral, so that the average
/// kernel is beta_bar(u) = p u^q.
struct AverageKernelResult {
  std::string kernel_id;
  double p = 0.0;
  Degree q;
  /// Convergence report of the underlying double integral (value Q = 2p).
  Report report;

  /// Remainder on the p scale (half the double-integral remainder); NaN when
  /// the tail diverges.
  double p_remainder() const { return report.remainder.remainder / 2.0; }
  bool has_remainder() const { return report.remainder.has_estimate(); }
  /// "3.4186u", "1.2931u^(4/3)", or "2.2013" for q = 0.
  std::string display(int decimals = 4) const;
};

/// Throws ValidationError for an asymmetric or non-homogeneous kernel or
/// k_max < 20; series and fit errors propagate.
AverageKernelResult pre_exponential_factor(const KernelSpec& spec, int k_max, const std::filesystem::path& cache_dir,
                                           std::optional<FitWindow> window = std::nullopt);

/// p u^q. Throws ValidationError for u <= 0.
double average_kernel(const AverageKernelResult& result, double u);

/// Grid for the population-average oracle: composite midpoint on
/// [delta_rel u, truncation u]^2, geometric cells below split u and uniform
/// cells above. The fine grid bisects every coarse cell, and the second axis
/// has one extra cell per segment so no midpoint lands on x = y.
struct OracleGrid {
  double delta_rel = 1e-8;
  double truncation = 60.0;
  double split = 1.0;
  int geometric_cells = 500;  ///< coarse grid; the fine grid has twice as many
  int uniform_cells = 1500;
  double tolerance = 1e-3;  ///< relative bound on the Richardson correction
};

struct OracleEstimate {
  /// Number-density weighted mean of beta over ordered pairs for the
  /// exponential distribution n(v) = (N/u) exp(-v/u); the mean of a constant
  /// kernel is that constant.
  double population_average = 0.0;
  /// Magnitude of the Richardson correction between the two grids.
  double error_estimate = 0.0;

  /// Half the population average: the p u^q normalization.
  double average_kernel() const { return population_average / 2.0; }
};

/// Independent estimate of the average kernel by midpoint quadrature in the
/// physical variables. Throws ResolutionError when the coarse and fine grids
/// disagree beyond grid.tolerance.
OracleEstimate population_average_oracle(const KernelSpec& spec, double u, const OracleGrid& grid = {});

}  // namespace avgkernel
