#include "avgkernel/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "avgkernel/error.hpp"
#include "avgkernel/format.hpp"

namespace avgkernel {

namespace {

constexpr int kSymmetrySamples = 64;
constexpr int kHomogeneitySamples = 32;
constexpr double kHomogeneitySpread = 1e-6;
constexpr double kSymmetryTolerance = 1e-12;

double eval_builtin(BuiltinKernel kernel, double x, double y) {
  const double cx = std::cbrt(x);
  const double cy = std::cbrt(y);
  const double sum = cx + cy;
  switch (kernel) {
    case BuiltinKernel::sc:
      return sum * sum * sum;
    case BuiltinKernel::sd:
      return sum * sum * sum * std::abs(cx - cy);
    case BuiltinKernel::fm:
      return std::sqrt(1.0 / x + 1.0 / y) * sum * sum;
    case BuiltinKernel::cr:
      return (1.0 / cx + 1.0 / cy) * sum;
  }
  return 0.0;
}

/// Log-uniform sample pairs on [lo, hi]^2 from a fixed seed.
std::vector<std::pair<double, double>> sample_pairs(int count, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_dist(std::log(lo), std::log(hi));
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double x = std::exp(log_dist(rng));
    const double y = std::exp(log_dist(rng));
    pairs.emplace_back(x, y);
  }
  return pairs;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<BuiltinKernel> lookup_builtin(std::string_view id) {
  const std::string key = lower(id);
  if (key == "fm") return BuiltinKernel::fm;
  if (key == "cr") return BuiltinKernel::cr;
  if (key == "sc") return BuiltinKernel::sc;
  if (key == "sd") return BuiltinKernel::sd;
  return std::nullopt;
}

}  // namespace

std::string Degree::to_string() const {
  if (fraction) {
    const auto [num, den] = *fraction;
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
  return format_shortest(value);
}

KernelSpec KernelSpec::builtin(BuiltinKernel kernel) {
  KernelSpec spec;
  spec.source_ = kernel;
  spec.id_ = builtin_name(kernel);
  spec.symmetric_ = true;
  switch (kernel) {
    case BuiltinKernel::fm:
      spec.degree_ = Degree::exact(1, 6);
      break;
    case BuiltinKernel::cr:
      spec.degree_ = Degree::exact(0, 1);
      break;
    case BuiltinKernel::sc:
      spec.degree_ = Degree::exact(1, 1);
      break;
    case BuiltinKernel::sd:
      spec.degree_ = Degree::exact(4, 3);
      break;
  }
  return spec;
}

std::optional<BuiltinKernel> KernelSpec::builtin_id() const {
  if (const auto* b = std::get_if<BuiltinKernel>(&source_)) return *b;
  return std::nullopt;
}

double KernelSpec::operator()(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0))
    throw DomainError("kernel " + id_ + " needs x, y > 0, got (" + format_sci17(x) + ", " + format_sci17(y) + ")");
  if (const auto* b = std::get_if<BuiltinKernel>(&source_)) return eval_builtin(*b, x, y);
  const double value = std::get<Expression>(source_).evaluate(x, y);
  if (value < 0.0)
    throw DomainError("kernel " + id_ + " is negative at (x, y) = (" + format_sci17(x) + ", " + format_sci17(y) +
                      ")");
  return value;
}

std::string builtin_name(BuiltinKernel kernel) {
  switch (kernel) {
    case BuiltinKernel::fm:
      return "FM";
    case BuiltinKernel::cr:
      return "CR";
    case BuiltinKernel::sc:
      return "SC";
    case BuiltinKernel::sd:
      return "SD";
  }
  return {};
}

KernelSpec builtin_kernel(BuiltinKernel kernel) { return KernelSpec::builtin(kernel); }

KernelSpec builtin_kernel(std::string_view id) {
  if (const auto kernel = lookup_builtin(id)) return KernelSpec::builtin(*kernel);
  throw UnknownKernelError("unknown builtin kernel '" + std::string(id) + "' (expected FM, CR, SC or SD)");
}

KernelSpec parse_kernel(std::string_view text) {
  std::string_view body;
  std::size_t offset = 0;
  const std::optional<double> explicit_q = split_degree_prefix(text, body, offset);

  KernelSpec spec;
  spec.source_ = Expression::parse(body, offset);
  std::string id(body);
  id.erase(0, id.find_first_not_of(" \t\n\r"));
  id.erase(id.find_last_not_of(" \t\n\r") + 1);
  spec.id_ = id;

  const Expression& expr = std::get<Expression>(spec.source_);
  bool symmetric = true;
  bool nonnegative = true;
  try {
    for (const auto& [x, y] : sample_pairs(kSymmetrySamples, 1e-2, 1e2, 0x5eedULL)) {
      const double a = expr.evaluate(x, y);
      const double b = expr.evaluate(y, x);
      if (std::abs(a - b) > kSymmetryTolerance * std::max(std::abs(a), std::abs(b))) symmetric = false;
      if (a < 0.0) nonnegative = false;
    }
  } catch (const DomainError& e) {
    symmetric = false;
    spec.warnings_.push_back(std::string("kernel could not be sampled: ") + e.what());
  }
  spec.symmetric_ = symmetric;
  if (!symmetric) spec.warnings_.push_back("kernel is not symmetric in x and y on sampled pairs");
  if (!nonnegative) spec.warnings_.push_back("kernel takes negative values on sampled pairs");

  std::optional<double> estimate;
  std::string homogeneity_problem;
  try {
    estimate = homogeneity_degree(spec);
  } catch (const Error& e) {
    homogeneity_problem = e.what();
  }
  if (explicit_q) {
    spec.degree_ = Degree{*explicit_q, std::nullopt};
    if (estimate && std::abs(*estimate - *explicit_q) > kHomogeneitySpread)
      spec.warnings_.push_back("explicit q=" + format_shortest(*explicit_q) + " differs from the estimated degree " +
                               format_shortest(*estimate));
    else if (!estimate)
      spec.warnings_.push_back("explicit q=" + format_shortest(*explicit_q) +
                               " could not be confirmed: " + homogeneity_problem);
  } else if (estimate) {
    spec.degree_ = Degree{*estimate, std::nullopt};
  } else {
    spec.warnings_.push_back(homogeneity_problem);
  }
  return spec;
}

KernelSpec resolve_kernel(std::string_view text) {
  if (const auto kernel = lookup_builtin(text)) return KernelSpec::builtin(*kernel);
  return parse_kernel(text);
}

double eval_kernel(const KernelSpec& spec, double x, double y) { return spec(x, y); }

double homogeneity_degree(const KernelSpec& spec) {
  std::vector<double> estimates;
  for (const auto& [x, y] : sample_pairs(kHomogeneitySamples, 0.1, 10.0, 0x4d6fULL)) {
    const double base = spec(x, y);
    if (!(base > 0.0)) continue;
    for (const double alpha : {2.0, 0.5}) {
      const double scaled = spec(alpha * x, alpha * y);
      if (!(scaled > 0.0)) continue;
      estimates.push_back(std::log(scaled / base) / std::log(alpha));
    }
  }
  if (estimates.empty()) throw NonHomogeneousError("kernel " + spec.id() + " vanishes on every sample pair");
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  if (*hi - *lo > kHomogeneitySpread)
    throw NonHomogeneousError("kernel " + spec.id() + " is not homogeneous: degree estimates range over [" +
                              format_shortest(*lo) + ", " + format_shortest(*hi) + "]");
  double sum = 0.0;
  for (double q : estimates) sum += q;
  return sum / static_cast<double>(estimates.size());
}

double euler_identity_residual(const KernelSpec& spec, double x, double y, double h) {
  if (!spec.degree()) throw ValidationError("kernel " + spec.id() + " has no homogeneity degree");
  if (!(h > 0.0) || !(h < 1.0)) throw ValidationError("relative step must lie in (0, 1)");
  const double q = spec.degree()->value;
  const double beta = spec(x, y);
  // x * d/dx via central difference of step h*x
  const double x_term = (spec(x * (1.0 + h), y) - spec(x * (1.0 - h), y)) / (2.0 * h);
  const double y_term = (spec(x, y * (1.0 + h)) - spec(x, y * (1.0 - h))) / (2.0 * h);
  return (x_term + y_term - q * beta) / beta;
}

}  // namespace avgkernel
