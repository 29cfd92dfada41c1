#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "avgkernel/expression.hpp"

namespace avgkernel {

/// Dimensionless collision kernels with physical constants dropped.
enum class BuiltinKernel {
  fm,  ///< Brownian, free-molecule regime: (1/x + 1/y)^(1/2) (x^(1/3) + y^(1/3))^2
  cr,  ///< Brownian, continuum regime: (x^(-1/3) + y^(-1/3)) (x^(1/3) + y^(1/3))
  sc,  ///< shear: (x^(1/3) + y^(1/3))^3
  sd,  ///< gravitational sedimentation: (x^(1/3) + y^(1/3))^3 |x^(1/3) - y^(1/3)|
};

/// Homogeneity degree q; builtins carry the exact fraction.
struct Degree {
  double value = 0.0;
  std::optional<std::pair<int, int>> fraction;

  static Degree exact(int numerator, int denominator) {
    return {static_cast<double>(numerator) / denominator, std::make_pair(numerator, denominator)};
  }
  /// "1/6", "1", "0", or the shortest decimal for non-rational degrees.
  std::string to_string() const;
};

/// Symmetric homogeneous kernel beta(x, y), builtin or parsed. Immutable.
class KernelSpec {
 public:
  static KernelSpec builtin(BuiltinKernel kernel);

  /// Short identifier: "FM", "CR", "SC", "SD", or the expression source.
  const std::string& id() const { return id_; }
  const std::optional<Degree>& degree() const { return degree_; }
  /// True only if verified on sampled pairs.
  bool symmetric() const { return symmetric_; }
  /// Non-fatal findings recorded while building the spec.
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::optional<BuiltinKernel> builtin_id() const;
  /// Parsed tree, for custom kernels.
  const Expression* expression() const { return std::get_if<Expression>(&source_); }

  /// beta(x, y) for x, y > 0. Throws DomainError, including for negative values.
  double operator()(double x, double y) const;

 private:
  friend KernelSpec parse_kernel(std::string_view text);
  KernelSpec() = default;

  std::variant<BuiltinKernel, Expression> source_ = BuiltinKernel::sc;
  std::string id_;
  std::optional<Degree> degree_;
  bool symmetric_ = false;
  std::vector<std::string> warnings_;
};

/// Case-insensitive "fm", "cr", "sc", "sd". Throws UnknownKernelError.
KernelSpec builtin_kernel(std::string_view id);
KernelSpec builtin_kernel(BuiltinKernel kernel);
std::string builtin_name(BuiltinKernel kernel);

/// Parses "[q=<number>;] expr". Without the prefix, q is estimated by
/// homogeneity_degree and left unset when the kernel is not homogeneous.
/// Symmetry is verified on 64 random pairs; failures become warnings.
KernelSpec parse_kernel(std::string_view text);

/// Builtin identifier if text names one, otherwise parse_kernel.
KernelSpec resolve_kernel(std::string_view text);

double eval_kernel(const KernelSpec& spec, double x, double y);

/// Mean of ln(beta(a x, a y) / beta(x, y)) / ln a over 32 random pairs and
/// a in {2, 1/2}. Throws NonHomogeneousError if the estimates spread by more
/// than 1e-6.
double homogeneity_degree(const KernelSpec& spec);

/// (x beta_x + y beta_y - q beta) / beta with central differences of relative
/// step h. Near zero for smooth homogeneous kernels.
double euler_identity_residual(const KernelSpec& spec, double x, double y, double h);

}  // namespace avgkernel
