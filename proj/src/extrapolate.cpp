#include "avgkernel/extrapolate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "avgkernel/error.hpp"
#include "avgkernel/format.hpp"

namespace avgkernel {

namespace {

constexpr std::size_t kMinReportLength = 20;

std::string window_text(FitWindow w) { return std::to_string(w.first) + ":" + std::to_string(w.last); }

}  // namespace

std::vector<ErrorPoint> error_sequence(const ConvergenceSeries& series) {
  if (series.values.size() < 2)
    throw InsufficientDataError("error sequence needs at least 2 series entries, got " +
                                std::to_string(series.values.size()));
  std::vector<ErrorPoint> errors;
  errors.reserve(series.values.size() - 1);
  for (std::size_t i = 0; i + 1 < series.values.size(); ++i)
    errors.push_back({series.orders[i], std::abs(series.values[i + 1] - series.values[i])});
  return errors;
}

double fit_slope(std::span<const ErrorPoint> errors, FitWindow window) {
  // Centered two-pass least squares; ln n spans at most a few units.
  std::vector<double> xs;
  std::vector<double> ys;
  for (const ErrorPoint& p : errors) {
    if (p.order < window.first || p.order > window.last || !(p.error > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(p.order)));
    ys.push_back(std::log(p.error));
  }
  if (xs.size() < 2)
    throw DegenerateFitError("slope fit over window " + window_text(window) + " has " +
                             std::to_string(xs.size()) + " positive error points, need 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateFitError("slope fit over window " + window_text(window) + " is degenerate");
  return sxy / sxx;
}

double remainder_estimate(double eps_n, double slope, int n) {
  if (!(slope < -1.0))
    throw DivergentTailError("error decay slope C = " + format_shortest(slope) +
                             " >= -1: the tail integral diverges, no remainder estimate");
  if (!(eps_n > 0.0)) throw ValidationError("remainder estimate needs eps_n > 0");
  if (n < 1) throw ValidationError("remainder estimate needs n >= 1");
  const double ratio = (n + 1.0) / n;
  return -eps_n * std::pow(ratio, slope) * (n + 1.0) / (slope + 1.0);
}

FitWindow default_fit_window(int k_max) { return {(k_max + 1) / 2, k_max - 1}; }

Report full_report(const ConvergenceSeries& series, std::optional<FitWindow> window) {
  if (series.values.size() < kMinReportLength)
    throw InsufficientDataError("report needs at least " + std::to_string(kMinReportLength) +
                                " series entries, got " + std::to_string(series.values.size()));
  const int k_max = series.orders.back();
  const FitWindow w = window.value_or(default_fit_window(k_max));
  if (w.first < 1 || w.last > k_max - 1 || w.first > w.last)
    throw ValidationError("fit window " + window_text(w) + " must lie within 1:" + std::to_string(k_max - 1));

  Report report;
  report.integrand_id = series.integrand_id;
  report.k_max = k_max;
  report.value = series.values.back();

  std::vector<ErrorPoint> errors = error_sequence(series);
  // Differences at round-off level carry no decay information. Weight
  // round-off grows roughly linearly with the order, so the floor does too.
  double scale = 0.0;
  for (double v : series.values) scale = std::max(scale, std::abs(v));
  const double unit_noise = 8.0 * std::numeric_limits<double>::epsilon() * scale;
  std::size_t in_window = 0;
  std::size_t zeros = 0;
  for (ErrorPoint& p : errors) {
    if (p.error <= unit_noise * (p.order + 1)) p.error = 0.0;
    if (p.order >= w.first && p.order <= w.last) {
      ++in_window;
      if (p.error == 0.0) ++zeros;
    }
  }

  RemainderEstimate& r = report.remainder;
  r.fit_window = w;
  r.anchor_order = errors.back().order;
  r.anchor_error = errors.back().error;
  if (2 * zeros > in_window) {
    r.status = RemainderStatus::converged_exactly;
    r.slope = 0.0;
    r.remainder = 0.0;
    return report;
  }
  r.slope = fit_slope(errors, w);
  if (!(r.slope < -1.0)) {
    r.status = RemainderStatus::divergent_tail;
    r.remainder = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  r.status = RemainderStatus::estimated;
  r.remainder = r.anchor_error > 0.0 ? remainder_estimate(r.anchor_error, r.slope, r.anchor_order) : 0.0;
  return report;
}

std::string Report::summary(int decimals) const {
  switch (remainder.status) {
    case RemainderStatus::estimated:
      return "II = " + format_fixed(value, decimals) + " ± " + format_fixed(remainder.remainder, decimals);
    case RemainderStatus::converged_exactly:
      return "II = " + format_fixed(value, decimals) + " ± " + format_fixed(0.0, decimals) +
             " (converged exactly, R = 0)";
    case RemainderStatus::divergent_tail:
      break;
  }
  return "II = " + format_fixed(value, decimals) + " (no remainder estimate: slope C >= -1)";
}

}  // namespace avgkernel
