#include "avgkernel/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "avgkernel/average.hpp"
#include "avgkernel/error.hpp"
#include "avgkernel/extrapolate.hpp"
#include "avgkernel/format.hpp"
#include "avgkernel/kernels.hpp"
#include "avgkernel/rules.hpp"
#include "avgkernel/tensor_quad.hpp"

namespace avgkernel::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kDefaultConvergeOrders = 100;
constexpr int kDefaultReportOrders = 361;
constexpr std::array<double, 3> kCheckVolumes = {0.5, 1.0, 2.0};
constexpr std::array<BuiltinKernel, 4> kTableKernels = {BuiltinKernel::fm, BuiltinKernel::cr, BuiltinKernel::sc,
                                                        BuiltinKernel::sd};

enum class Command { rule, converge, report, table3, check };
enum class Format { csv, json };

struct RunConfig {
  Command command = Command::rule;
  std::string kernel;
  int k_max = 0;
  std::optional<FitWindow> fit_window;
  Format format = Format::csv;
  std::filesystem::path cache_dir;
};

std::optional<FitWindow> parse_window(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  double a = 0.0;
  double b = 0.0;
  if (colon == std::string::npos || !parse_double(text.substr(0, colon), a) ||
      !parse_double(text.substr(colon + 1), b) || a != std::trunc(a) || b != std::trunc(b) || a < 1 || b < a)
    throw ValidationError("--fit-window expects A:B with integers 1 <= A <= B, got '" + text + "'");
  return FitWindow{static_cast<int>(a), static_cast<int>(b)};
}

ordered_json nullable(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

const char* status_name(RemainderStatus s) {
  switch (s) {
    case RemainderStatus::estimated:
      return "estimated";
    case RemainderStatus::converged_exactly:
      return "converged_exactly";
    case RemainderStatus::divergent_tail:
      return "divergent_tail";
  }
  return "";
}

ordered_json report_json(const Report& report) {
  const RemainderEstimate& r = report.remainder;
  ordered_json j;
  j["kernel"] = report.integrand_id;
  j["k_max"] = report.k_max;
  j["Q"] = report.value;
  j["anchor_order"] = r.anchor_order;
  j["eps_n"] = r.anchor_error;
  j["C"] = r.status == RemainderStatus::estimated || r.status == RemainderStatus::divergent_tail
               ? ordered_json(r.slope)
               : ordered_json(nullptr);
  j["R"] = nullable(r.remainder);
  j["status"] = status_name(r.status);
  j["fit_window"] = {r.fit_window.first, r.fit_window.last};
  j["summary"] = report.summary();
  return j;
}

void warn(const KernelSpec& spec, std::ostream& err) {
  for (const std::string& w : spec.warnings()) err << "warning: " << w << '\n';
}

int cmd_rule(const RunConfig& config, std::ostream& out) {
  const QuadratureRule rule = load_or_compute_rule(config.k_max, config.cache_dir);
  if (config.format == Format::json) {
    ordered_json j;
    j["order"] = rule.order;
    j["nodes"] = rule.nodes;
    j["weights"] = rule.weights;
    out << j.dump(2) << '\n';
    return kSuccess;
  }
  out << "# i,x,w\n";
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    out << i + 1 << ',' << format_sci17(rule.nodes[i]) << ',' << format_sci17(rule.weights[i]) << '\n';
  return kSuccess;
}

int cmd_converge(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const KernelSpec spec = resolve_kernel(config.kernel);
  warn(spec, err);
  const ConvergenceSeries series =
      convergence_series([&spec](double x, double y) { return spec(x, y); }, spec.id(), config.k_max,
                         config.cache_dir);
  std::optional<Report> report;
  std::string unavailable;
  try {
    report = full_report(series, config.fit_window);
  } catch (const InsufficientDataError& e) {
    unavailable = e.what();
  }

  const std::size_t n = series.values.size();
  if (config.format == Format::json) {
    ordered_json j;
    j["kernel"] = spec.id();
    j["k_max"] = config.k_max;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      ordered_json row;
      row["k"] = series.orders[i];
      row["Q"] = series.values[i];
      row["eps"] = i + 1 < n ? ordered_json(std::abs(series.values[i + 1] - series.values[i])) : ordered_json(nullptr);
      rows.push_back(row);
    }
    j["series"] = rows;
    j["report"] = report ? report_json(*report) : ordered_json(nullptr);
    if (!report) j["report_unavailable"] = unavailable;
    out << j.dump(2) << '\n';
    return kSuccess;
  }

  out << "# kernel=" << spec.id() << " k_max=" << config.k_max << '\n';
  out << "# k,Q,eps\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << series.orders[i] << ',' << format_sci17(series.values[i]) << ',';
    if (i + 1 < n) out << format_sci17(std::abs(series.values[i + 1] - series.values[i]));
    out << '\n';
  }
  if (!report) {
    out << "# report unavailable: " << unavailable << '\n';
    return kSuccess;
  }
  const RemainderEstimate& r = report->remainder;
  out << "# fit_window=" << r.fit_window.first << ':' << r.fit_window.last << '\n';
  out << "# n=" << r.anchor_order << " eps_n=" << format_sci17(r.anchor_error) << '\n';
  if (r.status == RemainderStatus::converged_exactly) {
    out << "# C=none\n# R=0\n";
  } else {
    out << "# C=" << format_sci17(r.slope) << '\n';
    out << "# R=" << (r.has_estimate() ? format_sci17(r.remainder) : std::string("none")) << '\n';
  }
  out << "# " << report->summary() << '\n';
  return kSuccess;
}

int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<KernelSpec> specs;
  if (config.kernel.empty()) {
    for (BuiltinKernel k : kTableKernels) specs.push_back(builtin_kernel(k));
  } else {
    specs.push_back(resolve_kernel(config.kernel));
    warn(specs.back(), err);
  }
  ordered_json rows = ordered_json::array();
  if (config.format == Format::csv) out << "# type,k_max,n,eps_n,C,Q,R,II\n";
  for (const KernelSpec& spec : specs) {
    const ConvergenceSeries series =
        convergence_series([&spec](double x, double y) { return spec(x, y); }, spec.id(), config.k_max,
                           config.cache_dir);
    const Report report = full_report(series, config.fit_window);
    if (config.format == Format::json) {
      rows.push_back(report_json(report));
      continue;
    }
    const RemainderEstimate& r = report.remainder;
    out << spec.id() << ',' << report.k_max << ',' << r.anchor_order << ',' << format_sci17(r.anchor_error) << ','
        << (r.status == RemainderStatus::converged_exactly ? std::string() : format_sci17(r.slope)) << ','
        << format_sci17(report.value) << ',' << (r.has_estimate() ? format_sci17(r.remainder) : std::string())
        << ',' << report.summary() << '\n';
  }
  if (config.format == Format::json) out << ordered_json{{"rows", rows}}.dump(2) << '\n';
  return kSuccess;
}

int cmd_table3(const RunConfig& config, std::ostream& out) {
  ordered_json rows = ordered_json::array();
  if (config.format == Format::csv) out << "# type,p,q,beta_bar\n";
  auto flush_json = [&] {
    if (config.format == Format::json) out << ordered_json{{"rows", rows}}.dump(2) << '\n';
  };
  for (BuiltinKernel kernel : kTableKernels) {
    AverageKernelResult result;
    try {
      result = pre_exponential_factor(builtin_kernel(kernel), config.k_max, config.cache_dir, config.fit_window);
    } catch (...) {
      flush_json();
      throw;
    }
    if (config.format == Format::json) {
      ordered_json row;
      row["type"] = result.kernel_id;
      row["p"] = result.p;
      row["p_remainder"] = nullable(result.p_remainder());
      row["q"] = result.q.to_string();
      row["q_value"] = result.q.value;
      row["beta_bar"] = result.display();
      rows.push_back(row);
    } else {
      out << result.kernel_id << ',' << format_sci17(result.p) << ',' << result.q.to_string() << ','
          << result.display() << '\n';
    }
  }
  flush_json();
  return kSuccess;
}

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const KernelSpec spec = resolve_kernel(config.kernel);
  warn(spec, err);
  if (!spec.degree()) throw NonHomogeneousError("kernel " + spec.id() + " is not homogeneous; check needs a degree q");
  if (!spec.symmetric()) throw ValidationError("kernel " + spec.id() + " is not symmetric");
  const AverageKernelResult result = pre_exponential_factor(spec, config.k_max, config.cache_dir, config.fit_window);
  const OracleGrid grid;

  bool all_pass = true;
  ordered_json checks = ordered_json::array();
  if (config.format == Format::csv) {
    out << "# kernel=" << spec.id() << " p=" << format_sci17(result.p) << " q=" << result.q.to_string() << '\n';
    out << "# u,average_kernel,oracle,delta,tolerance,status\n";
  }
  for (double u : kCheckVolumes) {
    const OracleEstimate oracle = population_average_oracle(spec, u, grid);
    const double expected = average_kernel(result, u);
    const double delta = std::abs(oracle.average_kernel() - expected);
    double tolerance = grid.tolerance * std::abs(oracle.average_kernel());
    if (result.has_remainder())
      tolerance = std::max(tolerance, 2.0 * result.p_remainder() * std::pow(u, result.q.value));
    const bool pass = delta <= tolerance;
    all_pass = all_pass && pass;
    if (config.format == Format::json) {
      checks.push_back({{"u", u},
                        {"average_kernel", expected},
                        {"oracle", oracle.average_kernel()},
                        {"population_average", oracle.population_average},
                        {"delta", delta},
                        {"tolerance", tolerance},
                        {"pass", pass}});
    } else {
      out << format_shortest(u) << ',' << format_sci17(expected) << ',' << format_sci17(oracle.average_kernel())
          << ',' << format_sci17(delta) << ',' << format_sci17(tolerance) << ',' << (pass ? "pass" : "FAIL") << '\n';
    }
  }
  if (config.format == Format::json)
    out << ordered_json{{"kernel", spec.id()}, {"checks", checks}, {"pass", all_pass}}.dump(2) << '\n';
  return all_pass ? kSuccess : kCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Average coagulation kernels by Gauss-Laguerre quadrature of double integrals", "avgkernel"};
  app.require_subcommand(1);

  RunConfig config;
  std::string format = "csv";
  std::string window;
  std::string cache_dir;
  std::vector<CLI::Option*> cache_options;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cache_options.push_back(
        sub->add_option("--cache-dir", cache_dir, "Rule cache directory (empty disables; default from "
                                                  "AVGKERNEL_CACHE_DIR or ~/.cache/avgkernel)"));
  };

  CLI::App* rule = app.add_subcommand("rule", "Print a k-point Gauss-Laguerre rule");
  rule->add_option("--points", config.k_max, "Number of points k")->required()->check(CLI::PositiveNumber);
  common(rule);

  CLI::App* converge = app.add_subcommand("converge", "Series Q_{k,k} for k = 1..K with error and remainder");
  converge->add_option("--kernel", config.kernel, "Builtin id (fm, cr, sc, sd) or expression")->required();
  converge->add_option("--max-points", config.k_max, "Largest order K")
      ->default_val(kDefaultConvergeOrders)
      ->check(CLI::Range(2, 100000));
  converge->add_option("--fit-window", window, "Slope fit window A:B over error orders");
  common(converge);

  CLI::App* report = app.add_subcommand("report", "Error, slope, value and remainder rows (all builtins by default)");
  report->add_option("--kernel", config.kernel, "Builtin id or expression");
  report->add_option("--max-points", config.k_max, "Largest order K")
      ->default_val(kDefaultReportOrders)
      ->check(CLI::Range(20, 100000));
  report->add_option("--fit-window", window, "Slope fit window A:B over error orders");
  common(report);

  CLI::App* table3 = app.add_subcommand("table3", "Pre-exponential factors p and average kernels p u^q");
  table3->add_option("--max-points", config.k_max, "Largest order K")
      ->default_val(kDefaultReportOrders)
      ->check(CLI::Range(20, 100000));
  table3->add_option("--fit-window", window, "Slope fit window A:B over error orders");
  common(table3);

  CLI::App* check = app.add_subcommand("check", "Compare p u^q against the population-average oracle");
  check->add_option("--kernel", config.kernel, "Builtin id or expression")->required();
  check->add_option("--max-points", config.k_max, "Largest order K")
      ->default_val(kDefaultReportOrders)
      ->check(CLI::Range(20, 100000));
  check->add_option("--fit-window", window, "Slope fit window A:B over error orders");
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kSuccess;
    }
    err << "avgkernel: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    if (rule->parsed()) config.command = Command::rule;
    if (converge->parsed()) config.command = Command::converge;
    if (report->parsed()) config.command = Command::report;
    if (table3->parsed()) config.command = Command::table3;
    if (check->parsed()) config.command = Command::check;
    config.format = format == "json" ? Format::json : Format::csv;
    config.fit_window = parse_window(window);
    bool explicit_cache = false;
    for (const CLI::Option* o : cache_options) explicit_cache = explicit_cache || o->count() > 0;
    config.cache_dir = explicit_cache ? std::filesystem::path(cache_dir) : default_cache_dir();

    switch (config.command) {
      case Command::rule:
        return cmd_rule(config, out);
      case Command::converge:
        return cmd_converge(config, out, err);
      case Command::report:
        return cmd_report(config, out, err);
      case Command::table3:
        return cmd_table3(config, out);
      case Command::check:
        return cmd_check(config, out, err);
    }
  } catch (const ValidationError& e) {
    err << "avgkernel: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "avgkernel: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "avgkernel: internal error: " << e.what() << '\n';
    return kNumeric;
  }
  return kNumeric;
}

}  // namespace avgkernel::cli
