#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "avgkernel/rules.hpp"

namespace avgkernel {

using Integrand1D = std::function<double(double)>;
using Integrand2D = std::function<double(double, double)>;

/// Q_{k,k} for k = 1..k_max of one 2D integrand.
struct ConvergenceSeries {
  std::vector<int> orders;
  std::vector<double> values;
  std::string integrand_id;
};

/// sum_i A_i f(x_i). Throws NonFiniteIntegrandError naming the node.
double integrate_1d(const QuadratureRule& rule, const Integrand1D& f);

/// sum_i sum_j A_i A_j f(x_i, x_j), i outer and j inner, compensated.
/// Throws NonFiniteIntegrandError naming the node pair.
double integrate_2d(const QuadratureRule& rule, const Integrand2D& f);

/// Square tensor rule values for every order 1..k_max, each rule taken from
/// load_or_compute_rule(k, cache_dir). Failures are rethrown as NumericError
/// carrying the offending k.
ConvergenceSeries convergence_series(const Integrand2D& f, std::string integrand_id, int k_max,
                                     const std::filesystem::path& cache_dir);

}  // namespace avgkernel
