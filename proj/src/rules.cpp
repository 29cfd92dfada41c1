#include "avgkernel/rules.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

#include "avgkernel/error.hpp"
#include "avgkernel/format.hpp"
#include "avgkernel/laguerre.hpp"

namespace avgkernel {

namespace {

constexpr int kMaxNewtonSteps = 200;
constexpr int kMaxBracketSteps = 100000;
constexpr double kResidualTolerance = 1e-13;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Asymptotic prediction of the next zero from the previous two
/// (zero-based index i >= 1). Only used as a Newton seed.
double predict_root(int k, int i, const std::vector<double>& nodes) {
  if (i == 0) return 3.0 / (1.0 + 2.4 * k);
  if (i == 1) return nodes[0] + 15.0 / (1.0 + 2.5 * k);
  const double j = i - 1;  // Numerical Recipes' (i - 2) for one-based i
  return nodes[i - 1] + (1.0 + 2.55 * j) / (1.9 * j) * (nodes[i - 1] - nodes[i - 2]);
}

/// Polishes the zero of L_k inside (lo, hi), where L_k changes sign.
double polish_root(int k, double lo, double hi, double guess, int sign_below) {
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int step = 0; step < kMaxNewtonSteps; ++step) {
    const ScaledPair pair = laguerre_pair_scaled(k, x);
    if (pair.current == 0.0) return x;
    if (sign_of(pair.current) == sign_below)
      lo = x;
    else
      hi = x;
    // L_k / L_k' = x * L_k / (k (L_k - L_{k-1})); the common scale cancels.
    const double slope = k * (pair.current - pair.previous);
    const double dx = slope != 0.0 ? x * pair.current / slope : 0.0;
    if (slope != 0.0 && std::abs(dx) <= kResidualTolerance * x) return x - dx;
    double next = x - dx;
    if (slope == 0.0 || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * x) return next;
    x = next;
  }
  throw ConvergenceError("Newton iteration for a zero of L_" + std::to_string(k) +
                         " did not converge in " + std::to_string(kMaxNewtonSteps) + " steps near x=" +
                         format_sci17(x));
}

/// L_k and L_{k-1} in extended precision with the same power-of-two
/// renormalization as laguerre_pair_scaled. Used for the final polish and
/// the weights, where double rounding would cost a few ulps.
struct ExtendedPair {
  long double current = 1.0L;
  long double previous = 0.0L;
  std::int64_t exponent = 0;
};

ExtendedPair extended_pair(int k, long double x) {
  ExtendedPair pair;
  if (k == 0) return pair;
  pair.previous = 1.0L;
  pair.current = 1.0L - x;
  const long double upper = std::ldexp(1.0L, 512);
  const long double lower = std::ldexp(1.0L, -512);
  for (int n = 1; n < k; ++n) {
    const long double next = ((2.0L * n + 1.0L - x) * pair.current - n * pair.previous) / (n + 1.0L);
    pair.previous = pair.current;
    pair.current = next;
    const long double magnitude = std::max(std::abs(pair.current), std::abs(pair.previous));
    if (magnitude > upper || (magnitude < lower && magnitude != 0.0L)) {
      int e = 0;
      std::frexp(magnitude, &e);
      pair.current = std::ldexp(pair.current, -e);
      pair.previous = std::ldexp(pair.previous, -e);
      pair.exponent += e;
    }
  }
  return pair;
}

/// One Newton step on L_k in extended precision.
double refine_root(int k, double root) {
  const long double x = root;
  const ExtendedPair pair = extended_pair(k, x);
  const long double slope = k * (pair.current - pair.previous);
  if (slope == 0.0L) return root;
  return static_cast<double>(x - x * pair.current / slope);
}

double christoffel_weight(int k, double node) {
  const ExtendedPair next = extended_pair(k + 1, node);
  int e = 0;
  const long double m = std::frexp(next.current, &e);
  const long double t = (k + 1.0L) * m;
  const std::int64_t shift = -2 * (next.exponent + e);
  if (shift < -4000) return 0.0;
  const double weight = static_cast<double>(
      std::ldexp(static_cast<long double>(node) / (t * t), static_cast<int>(std::min<std::int64_t>(shift, 4000))));
  return weight < std::numeric_limits<double>::min() ? 0.0 : weight;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string header_line(int order, int flushed) {
  return "# gauss-laguerre order=" + std::to_string(order) + " flushed=" + std::to_string(flushed) +
         " version=1\n";
}

std::string temp_suffix() {
  static std::atomic<unsigned> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  return ".tmp." + std::to_string(::getpid()) + "." + std::to_string(tid) + "." +
         std::to_string(counter.fetch_add(1));
}

void write_atomically(const std::filesystem::path& target, const std::string& contents) {
  const std::filesystem::path temp = target.string() + temp_suffix();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create cache file " + temp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw IoError("cannot write cache file " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(temp, ignored);
    throw IoError("cannot move cache file into place at " + target.string() + ": " + ec.message());
  }
}

}  // namespace

QuadratureRule compute_rule(int k) {
  if (k < 1) throw ValidationError("quadrature order must be >= 1, got " + std::to_string(k));
  QuadratureRule rule;
  rule.order = k;
  rule.nodes.reserve(k);
  rule.weights.reserve(k);

  // Zero spacing of L_k grows monotonically, so stepping by half the previous
  // gap cannot jump over a zero.
  double previous_root = 0.0;
  double step = 0.5 * predict_root(k, 0, rule.nodes);
  for (int i = 0; i < k; ++i) {
    const int sign_below = (i % 2 == 0) ? 1 : -1;
    double lo = previous_root;
    double hi = lo + step;
    int bracket_steps = 0;
    while (sign_of(laguerre_pair_scaled(k, hi).current) == sign_below) {
      lo = hi;
      hi += step;
      if (++bracket_steps > kMaxBracketSteps)
        throw ConvergenceError("no sign change found for zero " + std::to_string(i + 1) + " of L_" +
                               std::to_string(k));
    }
    const double root = refine_root(k, polish_root(k, lo, hi, predict_root(k, i, rule.nodes), sign_below));
    if (!(root > previous_root))
      throw ConvergenceError("zero " + std::to_string(i + 1) + " of L_" + std::to_string(k) +
                             " is not above its predecessor");
    step = 0.5 * (root - previous_root);
    previous_root = root;
    rule.nodes.push_back(root);
  }

  for (double node : rule.nodes) {
    const double w = christoffel_weight(k, node);
    if (w == 0.0) ++rule.flushed;
    rule.weights.push_back(w);
  }
  return rule;
}

std::string rule_violation(const QuadratureRule& rule) {
  const auto k = static_cast<std::size_t>(rule.order);
  if (rule.order < 1) return "order must be >= 1";
  if (rule.nodes.size() != k || rule.weights.size() != k) return "node/weight count differs from order";
  const double upper = 4.0 * rule.order + 2.0;
  double sum = 0.0;
  int zeros = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = rule.nodes[i];
    const double w = rule.weights[i];
    if (!std::isfinite(x) || !(x > 0.0) || !(x < upper)) return "node " + std::to_string(i + 1) + " out of range";
    if (i > 0 && !(x > rule.nodes[i - 1])) return "nodes not strictly increasing at " + std::to_string(i + 1);
    if (!std::isfinite(w) || w < 0.0) return "weight " + std::to_string(i + 1) + " negative or non-finite";
    if (w == 0.0) ++zeros;
    sum += w;
  }
  if (zeros != rule.flushed) return "flushed count does not match zero weights";
  const double tolerance = rule.order <= 50 ? 1e-12 : 1e-9;
  if (std::abs(sum - 1.0) > tolerance) return "weights do not sum to 1";
  return {};
}

std::string cache_file_name(int k) { return "glq_" + std::to_string(k) + ".csv"; }

std::string serialize_rule(const QuadratureRule& rule) {
  std::string body = header_line(rule.order, rule.flushed);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    body += format_sci17(rule.nodes[i]);
    body += ',';
    body += format_sci17(rule.weights[i]);
    body += '\n';
  }
  body += "# sha256=" + sha256_hex(body) + "\n";
  return body;
}

QuadratureRule deserialize_rule(const std::string& contents, int expected_order) {
  const std::string marker = "# sha256=";
  if (contents.empty() || contents.back() != '\n') throw ValidationError("cache file is truncated");
  const auto trailer = contents.rfind('\n', contents.size() - 2);
  if (trailer == std::string::npos) throw ValidationError("cache file has no checksum line");
  const std::string_view body(contents.data(), trailer + 1);
  const std::string last = contents.substr(trailer + 1, contents.size() - trailer - 2);
  if (last.rfind(marker, 0) != 0) throw ValidationError("cache file has no checksum line");
  if (last.substr(marker.size()) != sha256_hex(body)) throw ValidationError("cache checksum mismatch");

  std::istringstream in{std::string(body)};
  std::string line;
  std::getline(in, line);
  QuadratureRule rule;
  rule.order = expected_order;
  {
    const std::string prefix = "# gauss-laguerre order=" + std::to_string(expected_order) + " flushed=";
    if (line.rfind(prefix, 0) != 0) throw ValidationError("cache header does not match order");
    const std::string rest = line.substr(prefix.size());
    const auto space = rest.find(' ');
    if (space == std::string::npos || rest.substr(space) != " version=1")
      throw ValidationError("unsupported cache header");
    double flushed = 0.0;
    if (!parse_double(rest.substr(0, space), flushed)) throw ValidationError("bad flushed count");
    rule.flushed = static_cast<int>(flushed);
    if (header_line(expected_order, rule.flushed) != line + "\n") throw ValidationError("bad cache header");
  }
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    double x = 0.0;
    double w = 0.0;
    if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), x) ||
        !parse_double(std::string_view(line).substr(comma + 1), w))
      throw ValidationError("malformed cache row");
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  }
  if (const std::string violation = rule_violation(rule); !violation.empty())
    throw ValidationError("cached rule invalid: " + violation);
  return rule;
}

QuadratureRule load_or_compute_rule(int k, const std::filesystem::path& cache_dir, CacheOutcome* outcome) {
  if (k < 1) throw ValidationError("quadrature order must be >= 1, got " + std::to_string(k));
  auto report = [&](CacheOutcome o) {
    if (outcome) *outcome = o;
  };
  if (cache_dir.empty()) {
    report(CacheOutcome::disabled);
    return compute_rule(k);
  }

  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory " + cache_dir.string() + ": " + ec.message());

  const std::filesystem::path file = cache_dir / cache_file_name(k);
  bool existed = false;
  {
    std::ifstream in(file, std::ios::binary);
    if (in) {
      existed = true;
      const std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
      try {
        QuadratureRule rule = deserialize_rule(contents, k);
        report(CacheOutcome::hit);
        return rule;
      } catch (const ValidationError&) {
        // fall through to recompute and overwrite
      }
    }
  }
  QuadratureRule rule = compute_rule(k);
  write_atomically(file, serialize_rule(rule));
  report(existed ? CacheOutcome::repaired : CacheOutcome::miss);
  return rule;
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("AVGKERNEL_CACHE_DIR")) return std::filesystem::path(env);
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    return std::filesystem::path(xdg) / "avgkernel";
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "avgkernel";
  return {};
}

}  // namespace avgkernel
