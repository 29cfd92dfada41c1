#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace avgkernel {

/// k-point Gauss-Laguerre rule for the weight e^{-x} on [0, inf).
///
/// Nodes are strictly increasing zeros of L_k; weights are the Christoffel
/// numbers x_i / ((k+1)^2 L_{k+1}(x_i)^2). Weights that fall below the
/// smallest normal double are stored as exact zeros and counted in
/// `flushed`.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  int flushed = 0;

  friend bool operator==(const QuadratureRule&, const QuadratureRule&) = default;
};

/// Newton iteration on L_k, each root bracketed by a sign change first.
/// Throws ValidationError for k < 1, ConvergenceError if an iteration stalls.
QuadratureRule compute_rule(int k);

/// Empty string when none of the invariants is violated, else a description.
std::string rule_violation(const QuadratureRule& rule);

enum class CacheOutcome { disabled, hit, miss, repaired };

/// Returns the rule stored in cache_dir/glq_{k}.csv if it passes checksum and
/// invariant validation; otherwise computes it and atomically replaces the
/// file. An empty cache_dir disables caching.
QuadratureRule load_or_compute_rule(int k, const std::filesystem::path& cache_dir,
                                    CacheOutcome* outcome = nullptr);

/// Cache location from AVGKERNEL_CACHE_DIR, falling back to
/// $XDG_CACHE_HOME/avgkernel or ~/.cache/avgkernel. Empty means disabled.
std::filesystem::path default_cache_dir();

/// Cache file name for order k.
std::string cache_file_name(int k);

/// Serialized cache file contents (header, rows, checksum trailer).
std::string serialize_rule(const QuadratureRule& rule);

/// Parses and validates cache file contents; throws ValidationError on any
/// checksum, format, or invariant failure.
QuadratureRule deserialize_rule(const std::string& contents, int expected_order);

}  // namespace avgkernel
