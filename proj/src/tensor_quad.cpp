#include "avgkernel/tensor_quad.hpp"

#include <cmath>
#include <string>

#include "avgkernel/error.hpp"
#include "avgkernel/format.hpp"
#include "avgkernel/summation.hpp"

namespace avgkernel {

double integrate_1d(const QuadratureRule& rule, const Integrand1D& f) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double value = f(rule.nodes[i]);
    if (!std::isfinite(value))
      throw NonFiniteIntegrandError("integrand is not finite at node x_" + std::to_string(i + 1) + " = " +
                                    format_sci17(rule.nodes[i]));
    sum.add(rule.weights[i] * value);
  }
  return sum.value();
}

double integrate_2d(const QuadratureRule& rule, const Integrand2D& f) {
  CompensatedSum sum;
  const std::size_t k = rule.nodes.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double value = f(rule.nodes[i], rule.nodes[j]);
      if (!std::isfinite(value))
        throw NonFiniteIntegrandError("integrand is not finite at node pair (x_" + std::to_string(i + 1) +
                                      ", x_" + std::to_string(j + 1) + ") = (" + format_sci17(rule.nodes[i]) +
                                      ", " + format_sci17(rule.nodes[j]) + ")");
      sum.add(rule.weights[i] * rule.weights[j] * value);
    }
  }
  return sum.value();
}

ConvergenceSeries convergence_series(const Integrand2D& f, std::string integrand_id, int k_max,
                                     const std::filesystem::path& cache_dir) {
  if (k_max < 2) throw ValidationError("convergence series needs k_max >= 2, got " + std::to_string(k_max));
  ConvergenceSeries series;
  series.integrand_id = std::move(integrand_id);
  series.orders.reserve(k_max);
  series.values.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    try {
      const QuadratureRule rule = load_or_compute_rule(k, cache_dir);
      series.values.push_back(integrate_2d(rule, f));
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      throw NumericError("k=" + std::to_string(k) + ": " + e.what());
    }
    series.orders.push_back(k);
  }
  return series;
}

}  // namespace avgkernel
