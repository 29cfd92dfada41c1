#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <iterator>
#include <thread>
#include <vector>

#include "avgkernel/error.hpp"
#include "avgkernel/rules.hpp"
#include "test_support.hpp"

using namespace avgkernel;
using avgkernel::testing::relative_difference;
using avgkernel::testing::TempDir;
using avgkernel::testing::truncate_decimals;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << contents;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("one- and two-point rules") {
  const QuadratureRule one = compute_rule(1);
  REQUIRE(one.nodes.size() == 1);
  CHECK(one.nodes[0] == 1.0);
  CHECK(one.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const QuadratureRule two = compute_rule(2);
  REQUIRE(two.nodes.size() == 2);
  const double r2 = std::sqrt(2.0);
  CHECK(relative_difference(two.nodes[0], 2.0 - r2) < 1e-14);
  CHECK(relative_difference(two.nodes[1], 2.0 + r2) < 1e-14);
  CHECK(relative_difference(two.weights[0], (2.0 + r2) / 4.0) < 1e-14);
  CHECK(relative_difference(two.weights[1], (2.0 - r2) / 4.0) < 1e-14);
}

TEST_CASE("ten-point rule matches reference values") {
  // Reference values are truncated to four decimals.
  const double nodes[] = {0.1377, 0.7294, 1.8083, 3.4014, 5.5524, 8.3301, 11.8437, 16.2792, 21.9965, 29.9206};
  const double weights[] = {0.3084, 0.4011, 0.2180, 0.0620, 0.0095, 0.0007};
  const double tiny_weights[] = {2.8e-05, 4.2e-07, 1.8e-09, 9.9e-13};
  const QuadratureRule rule = compute_rule(10);
  for (int i = 0; i < 10; ++i) {
    CAPTURE(i);
    CHECK(truncate_decimals(rule.nodes[i], 4) == doctest::Approx(nodes[i]).epsilon(1e-12));
    CHECK(std::abs(rule.nodes[i] - nodes[i]) < 1e-4);
  }
  for (int i = 0; i < 6; ++i) {
    CAPTURE(i);
    CHECK(truncate_decimals(rule.weights[i], 4) == doctest::Approx(weights[i]).epsilon(1e-12));
  }
  for (int i = 0; i < 4; ++i) {
    const double w = rule.weights[6 + i];
    const double scale = std::pow(10.0, std::floor(std::log10(w)) - 1);
    CAPTURE(i);
    CHECK(std::trunc(w / scale) * scale == doctest::Approx(tiny_weights[i]).epsilon(1e-9));
  }
}

TEST_CASE("invalid orders") {
  CHECK_THROWS_AS(compute_rule(0), ValidationError);
  CHECK_THROWS_AS(compute_rule(-3), ValidationError);
}

TEST_CASE("rule invariants hold up to order 400") {
  for (int k = 1; k <= 400; ++k) {
    const QuadratureRule rule = compute_rule(k);
    CAPTURE(k);
    CHECK(rule_violation(rule).empty());
    CHECK(rule.nodes.front() > 0.0);
  }
}

TEST_CASE("polynomial exactness") {
  for (int k = 1; k <= 100; ++k) {
    const QuadratureRule rule = compute_rule(k);
    const double tolerance = k <= 20 ? 1e-10 : 1e-7;
    for (int m = 0; m <= std::min(2 * k - 1, 40); ++m) {
      double sum = 0.0;
      for (int i = 0; i < k; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], m);
      CAPTURE(k);
      CAPTURE(m);
      CHECK(relative_difference(sum, factorial(m)) < tolerance);
    }
  }
}

TEST_CASE("weights and first moment") {
  for (int k = 1; k <= 50; ++k) {
    const QuadratureRule rule = compute_rule(k);
    double w = 0.0;
    double first = 0.0;
    for (int i = 0; i < k; ++i) {
      w += rule.weights[i];
      first += rule.weights[i] * rule.nodes[i];
    }
    CAPTURE(k);
    CHECK(std::abs(w - 1.0) <= 1e-12);
    CHECK(std::abs(first - 1.0) <= 1e-12);
  }
}

TEST_CASE("nodes interlace between consecutive orders") {
  QuadratureRule lower = compute_rule(1);
  for (int k = 1; k <= 100; ++k) {
    const QuadratureRule upper = compute_rule(k + 1);
    for (int i = 0; i < k; ++i) {
      CAPTURE(k);
      CAPTURE(i);
      CHECK(upper.nodes[i] < lower.nodes[i]);
      CHECK(lower.nodes[i] < upper.nodes[i + 1]);
    }
    lower = upper;
  }
}

TEST_CASE("compute_rule is deterministic") {
  const QuadratureRule a = compute_rule(137);
  const QuadratureRule b = compute_rule(137);
  CHECK(a == b);
}

TEST_CASE("agrees with the Jacobi-matrix eigenvalue construction") {
  for (int k : {5, 20, 50, 100}) {
    // Symmetric tridiagonal Jacobi matrix of the Laguerre recurrence.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      jacobi(i, i) = 2.0 * i + 1.0;
      if (i + 1 < k) jacobi(i, i + 1) = jacobi(i + 1, i) = i + 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    const QuadratureRule rule = compute_rule(k);
    for (int i = 0; i < k; ++i) {
      const double node = solver.eigenvalues()(i);
      const double weight = solver.eigenvectors()(0, i) * solver.eigenvectors()(0, i);
      CAPTURE(k);
      CAPTURE(i);
      CHECK(relative_difference(rule.nodes[i], node) < 1e-11);
      if (weight > 1e-8) CHECK(relative_difference(rule.weights[i], weight) < 1e-8);
    }
  }
}

TEST_CASE("large orders flush underflowing weights") {
  const QuadratureRule rule = compute_rule(361);
  CHECK(rule.flushed > 0);
  int zeros = 0;
  for (double w : rule.weights) zeros += (w == 0.0);
  CHECK(zeros == rule.flushed);
  // Flushed weights sit in the tail only.
  for (int i = 0; i + rule.flushed < 361; ++i) CHECK(rule.weights[i] > 0.0);
}

TEST_CASE("cache file format") {
  const QuadratureRule rule = compute_rule(3);
  const std::string text = serialize_rule(rule);
  CHECK(text.rfind("# gauss-laguerre order=3 flushed=0 version=1\n", 0) == 0);
  const auto last = text.rfind("# sha256=");
  REQUIRE(last != std::string::npos);
  CHECK(text.size() - last == std::string("# sha256=").size() + 64 + 1);
  CHECK(text.find("e-1,") != std::string::npos);  // bare exponent, lowercase
  CHECK(deserialize_rule(text, 3) == rule);
  CHECK_THROWS_AS(deserialize_rule(text, 4), ValidationError);

  std::string tampered = text;
  tampered[text.find(',') - 1] = tampered[text.find(',') - 1] == '1' ? '2' : '1';
  CHECK_THROWS_AS(deserialize_rule(tampered, 3), ValidationError);

  // A valid checksum over an invalid rule is still rejected.
  QuadratureRule bad = rule;
  std::swap(bad.nodes[0], bad.nodes[1]);
  CHECK_THROWS_AS(deserialize_rule(serialize_rule(bad), 3), ValidationError);
}

TEST_CASE("load_or_compute_rule caches, hits and repairs") {
  TempDir dir("rules-cache");
  const QuadratureRule reference = compute_rule(10);
  const auto file = dir.path() / "glq_10.csv";

  CacheOutcome outcome{};
  CHECK(load_or_compute_rule(10, dir.path(), &outcome) == reference);
  CHECK(outcome == CacheOutcome::miss);
  REQUIRE(std::filesystem::exists(file));
  const std::string written = read_file(file);

  CHECK(load_or_compute_rule(10, dir.path(), &outcome) == reference);
  CHECK(outcome == CacheOutcome::hit);
  CHECK(read_file(file) == written);

  write_file(file, written.substr(0, written.size() / 2));
  CHECK(load_or_compute_rule(10, dir.path(), &outcome) == reference);
  CHECK(outcome == CacheOutcome::repaired);
  CHECK(read_file(file) == written);

  write_file(file, "");
  CHECK(load_or_compute_rule(10, dir.path(), &outcome) == reference);
  CHECK(outcome == CacheOutcome::repaired);

  CHECK(load_or_compute_rule(10, "", &outcome) == reference);
  CHECK(outcome == CacheOutcome::disabled);

  // No temp files are left behind.
  int entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("concurrent writers for the same order") {
  TempDir dir("rules-concurrent");
  const QuadratureRule reference = compute_rule(60);
  std::vector<QuadratureRule> results(8);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t)
    threads.emplace_back([&, t] { results[t] = load_or_compute_rule(60, dir.path()); });
  for (auto& t : threads) t.join();
  for (const auto& r : results) CHECK(r == reference);
  CHECK(deserialize_rule(read_file(dir.path() / "glq_60.csv"), 60) == reference);
}

TEST_CASE("unwritable cache directory reports the path") {
  TempDir dir("rules-io");
  const auto blocker = dir.path() / "not-a-dir";
  write_file(blocker, "x");
  try {
    load_or_compute_rule(4, blocker / "sub");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("not-a-dir") != std::string::npos);
  }
}

TEST_CASE("default cache directory follows the environment") {
  ::setenv("AVGKERNEL_CACHE_DIR", "/tmp/somewhere", 1);
  CHECK(default_cache_dir() == std::filesystem::path("/tmp/somewhere"));
  ::setenv("AVGKERNEL_CACHE_DIR", "", 1);
  CHECK(default_cache_dir().empty());
  ::unsetenv("AVGKERNEL_CACHE_DIR");
  ::setenv("XDG_CACHE_HOME", "/tmp/xdg", 1);
  CHECK(default_cache_dir() == std::filesystem::path("/tmp/xdg/avgkernel"));
}
