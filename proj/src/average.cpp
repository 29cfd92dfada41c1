#include "avgkernel/average.hpp"

#include <cmath>
#include <vector>

#include "avgkernel/error.hpp"
#include "avgkernel/format.hpp"
#include "avgkernel/summation.hpp"

namespace avgkernel {

namespace {

constexpr int kMinOrders = 20;

std::vector<double> cell_edges(double u, const OracleGrid& grid, int extra) {
  const int geometric = grid.geometric_cells + extra;
  const int uniform = grid.uniform_cells + extra;
  const double lo = grid.delta_rel * u;
  const double mid = grid.split * u;
  const double hi = grid.truncation * u;
  std::vector<double> edges;
  edges.reserve(geometric + uniform + 1);
  const double log_ratio = std::log(mid / lo) / geometric;
  for (int i = 0; i < geometric; ++i) edges.push_back(lo * std::exp(log_ratio * i));
  const double h = (hi - mid) / uniform;
  for (int i = 0; i <= uniform; ++i) edges.push_back(mid + h * i);
  return edges;
}

std::vector<double> bisect(const std::vector<double>& edges) {
  std::vector<double> out;
  out.reserve(2 * edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(edges[i]);
    out.push_back(0.5 * (edges[i] + edges[i + 1]));
  }
  out.push_back(edges.back());
  return out;
}

struct Axis {
  std::vector<double> centers;
  std::vector<double> weights;  // cell width times the normalized density e^{-v/u}/u
};

Axis midpoint_axis(const std::vector<double>& edges, double u) {
  Axis axis;
  axis.centers.reserve(edges.size() - 1);
  axis.weights.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double c = 0.5 * (edges[i] + edges[i + 1]);
    axis.centers.push_back(c);
    axis.weights.push_back((edges[i + 1] - edges[i]) * std::exp(-c / u) / u);
  }
  return axis;
}

double midpoint_double_sum(const KernelSpec& spec, const Axis& a, const Axis& b) {
  CompensatedSum total;
  for (std::size_t i = 0; i < a.centers.size(); ++i) {
    CompensatedSum row;
    for (std::size_t j = 0; j < b.centers.size(); ++j) row.add(b.weights[j] * spec(a.centers[i], b.centers[j]));
    total.add(a.weights[i] * row.value());
  }
  return total.value();
}

}  // namespace

std::string AverageKernelResult::display(int decimals) const {
  const std::string prefactor = format_fixed(p, decimals);
  if (q.value == 0.0) return prefactor;
  if (q.fraction && q.fraction->first == q.fraction->second) return prefactor + "u";
  return prefactor + "u^(" + q.to_string() + ")";
}

AverageKernelResult pre_exponential_factor(const KernelSpec& spec, int k_max, const std::filesystem::path& cache_dir,
                                           std::optional<FitWindow> window) {
  if (k_max < kMinOrders)
    throw ValidationError("pre-exponential factor needs k_max >= " + std::to_string(kMinOrders) + ", got " +
                          std::to_string(k_max));
  if (!spec.symmetric()) throw ValidationError("kernel " + spec.id() + " is not symmetric");
  if (!spec.degree()) throw NonHomogeneousError("kernel " + spec.id() + " has no homogeneity degree");

  const ConvergenceSeries series =
      convergence_series([&spec](double x, double y) { return spec(x, y); }, spec.id(), k_max, cache_dir);
  AverageKernelResult result;
  result.kernel_id = spec.id();
  result.q = *spec.degree();
  result.report = full_report(series, window);
  result.p = result.report.value / 2.0;
  return result;
}

double average_kernel(const AverageKernelResult& result, double u) {
  if (!(u > 0.0)) throw ValidationError("mean volume u must be > 0");
  return result.p * std::pow(u, result.q.value);
}

OracleEstimate population_average_oracle(const KernelSpec& spec, double u, const OracleGrid& grid) {
  if (!(u > 0.0)) throw ValidationError("mean volume u must be > 0");
  if (grid.geometric_cells < 1 || grid.uniform_cells < 1 || !(grid.delta_rel > 0.0) ||
      !(grid.split > grid.delta_rel) || !(grid.truncation > grid.split))
    throw ValidationError("invalid oracle grid");

  const std::vector<double> coarse_x = cell_edges(u, grid, 0);
  const std::vector<double> coarse_y = cell_edges(u, grid, 1);
  const double coarse = midpoint_double_sum(spec, midpoint_axis(coarse_x, u), midpoint_axis(coarse_y, u));
  const double fine =
      midpoint_double_sum(spec, midpoint_axis(bisect(coarse_x), u), midpoint_axis(bisect(coarse_y), u));

  // Midpoint error is O(h^2): halving every cell cuts it by four.
  OracleEstimate estimate;
  estimate.population_average = (4.0 * fine - coarse) / 3.0;
  estimate.error_estimate = std::abs(fine - coarse) / 3.0;
  if (estimate.error_estimate > grid.tolerance * std::abs(estimate.population_average))
    throw ResolutionError("oracle grid refinements differ by " + format_sci17(estimate.error_estimate) +
                          ", above the relative tolerance " + format_shortest(grid.tolerance));
  return estimate;
}

}  // namespace avgkernel
