// layerfit: solve, tabulate and inspect the fitted Shishkin-mesh schemes.
//
// Exit status: 0 success, 2 usage error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "layerfit/layerfit.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kSolverError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string problem = "linear";
  std::string scheme = "f";
  std::string n = "64";
  std::string eps = "2^-10";
  std::string k = "6..11";
  std::string eps_list = "2^-3,2^-5,2^-10";
  std::string m;
  double tol = 1e-12;
  std::string output;
  std::string format = "csv";
};

layerfit::Problem problem_from(const RunSpec& spec) {
  if (spec.problem == "linear") return layerfit::linear_example();
  if (spec.problem == "cubic") return layerfit::cubic_example();
  throw UsageError("--problem: expected 'linear' or 'cubic', got '" + spec.problem + "'");
}

layerfit::Scheme scheme_from(const RunSpec& spec) {
  if (spec.scheme == "f" || spec.scheme == "F") return layerfit::Scheme::F;
  if (spec.scheme == "g" || spec.scheme == "G") return layerfit::Scheme::G;
  throw UsageError("--scheme: expected 'f' or 'g', got '" + spec.scheme + "'");
}

int n_from(const RunSpec& spec) {
  const auto n = layerfit::detail::parse_int(spec.n);
  if (!n || *n < 8) {
    throw UsageError("--n: expected an integer N >= 8 divisible by 4, got '" + spec.n + "'");
  }
  if (*n % 4 != 0) {
    throw UsageError("--n: N must be divisible by 4 (got " + spec.n + ")");
  }
  return *n;
}

double eps_from_text(const std::string& flag, const std::string& text) {
  const auto eps = layerfit::parse_epsilon(text);
  if (!eps) {
    throw UsageError(flag + ": expected a positive number or '2^-k', got '" + text + "'");
  }
  return *eps;
}

std::vector<double> eps_list_from(const RunSpec& spec) {
  std::vector<double> out;
  std::stringstream ss(spec.eps_list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(eps_from_text("--eps", item));
  if (out.empty()) throw UsageError("--eps: expected a comma-separated list such as '2^-3,2^-5'");
  return out;
}

std::pair<int, int> k_range_from(const RunSpec& spec) {
  const auto range = layerfit::parse_k_range(spec.k);
  if (!range || range->first < 3 || range->second > 20 || range->first > range->second) {
    throw UsageError("--k: expected 'kmin..kmax' with 3 <= kmin <= kmax <= 20, got '" + spec.k + "'");
  }
  return *range;
}

layerfit::SolveConfig config_from(const RunSpec& spec) {
  if (!(spec.tol > 0.0)) throw UsageError("--tol: expected a positive number");
  layerfit::SolveConfig config;
  config.tol = spec.tol;
  return config;
}

/// Output goes to --output when given, otherwise stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("--output: cannot open '" + path + "' for writing");
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }
  /// Human-readable summaries stay off stdout when data goes there.
  std::ostream& info() { return file_ ? std::cout : std::cerr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_solve(const RunSpec& spec) {
  const auto problem = problem_from(spec);
  const auto scheme = scheme_from(spec);
  const int n = n_from(spec);
  const double eps = eps_from_text("--eps", spec.eps);
  const auto config = config_from(spec);
  Sink sink(spec.output);

  const auto mesh = layerfit::build_shishkin(n, eps, problem.m());
  const auto sol = layerfit::solve(problem, mesh, scheme, config);
  layerfit::write_solution_csv(sink.out(), sol, problem);

  auto& info = sink.info();
  info << "problem " << problem.name() << ", scheme " << layerfit::scheme_name(scheme) << ", N " << n << ", eps "
       << layerfit::format_epsilon(eps) << '\n';
  info << "iterations " << sol.iterations << ", final residual " << layerfit::detail::printf_string("%.3e", sol.final_residual)
       << (sol.at_roundoff_floor ? " (rounding floor)" : "") << '\n';
  if (problem.has_exact()) {
    info << "E_N " << layerfit::format_error(layerfit::error_exact(sol, problem)) << '\n';
  }
  return 0;
}

int cmd_table(const RunSpec& spec) {
  const auto problem = problem_from(spec);
  const auto scheme = scheme_from(spec);
  const auto [k_min, k_max] = k_range_from(spec);
  const auto eps_values = eps_list_from(spec);
  const auto config = config_from(spec);
  if (spec.format != "csv" && spec.format != "md") {
    throw UsageError("--format: expected 'csv' or 'md', got '" + spec.format + "'");
  }
  Sink sink(spec.output);
  auto& out = sink.out();
  const bool csv = spec.format == "csv";

  std::vector<layerfit::ConvergenceReport> reports;
  std::optional<std::string> failure;
  for (double eps : eps_values) {
    try {
      reports.push_back(layerfit::build_report(problem, scheme, eps, k_min, k_max, config));
    } catch (const layerfit::ReportError& e) {
      reports.push_back(e.partial());
      failure = "eps " + layerfit::format_epsilon(eps) + ", " + e.what();
      if (csv) {
        layerfit::write_report_csv(out, reports);
        out << problem.name() << ',' << layerfit::scheme_name(scheme) << ',' << layerfit::format_epsilon(eps) << ','
            << e.failed_n() << ",FAILED,-\n";
      } else {
        layerfit::write_report_markdown(out, reports);
        out << "\nFAILED: " << *failure << '\n';
      }
      out.flush();
      std::cerr << "error: " << *failure << '\n';
      return kSolverError;
    }
  }
  if (csv) {
    layerfit::write_report_csv(out, reports);
  } else {
    layerfit::write_report_markdown(out, reports);
  }
  return 0;
}

int cmd_residuals(const RunSpec& spec) {
  const auto problem = problem_from(spec);
  const auto scheme = scheme_from(spec);
  const int n = n_from(spec);
  const double eps = eps_from_text("--eps", spec.eps);
  if (!problem.has_exact()) {
    throw UsageError("--problem: residuals need a problem with an exact solution ('" + problem.name() +
                     "' has none)");
  }
  Sink sink(spec.output);

  const auto mesh = layerfit::build_shishkin(n, eps, problem.m());
  const auto x = mesh.points();
  const auto xc = mesh.complements();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = problem.exact(x[i], xc[i], eps);
  const auto coeffs = layerfit::coefficients(mesh, problem.gamma());
  const auto r = layerfit::residual(scheme, problem, mesh, coeffs, y);

  auto& out = sink.out();
  out << "i,x,abs_residual\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << i << ',' << layerfit::detail::printf_string("%.17g", x[i]) << ','
        << layerfit::detail::printf_string("%.17g", std::abs(r.values[i])) << '\n';
  }
  return 0;
}

int cmd_mesh_dump(const RunSpec& spec) {
  const int n = n_from(spec);
  const double eps = eps_from_text("--eps", spec.eps);
  double m = 1.0;
  if (!spec.m.empty()) {
    const auto parsed = layerfit::detail::parse_double(spec.m);
    if (!parsed || !(*parsed > 0.0)) throw UsageError("--m: expected a positive number, got '" + spec.m + "'");
    m = *parsed;
  } else if (!spec.problem.empty()) {
    m = problem_from(spec).m();
  }
  Sink sink(spec.output);
  layerfit::write_mesh_csv(sink.out(), layerfit::build_shishkin(n, eps, m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fitted difference schemes on a Shishkin mesh for eps^2 y'' = f(x, y), y(0) = y(1) = 0"};
  app.require_subcommand(1);
  RunSpec spec;

  auto add_common = [&spec](CLI::App* sub) {
    sub->add_option("--problem", spec.problem, "linear | cubic")->capture_default_str();
    sub->add_option("--scheme", spec.scheme, "f | g")->capture_default_str();
    sub->add_option("--tol", spec.tol, "Newton residual tolerance")->capture_default_str();
    sub->add_option("-o,--output", spec.output, "output file (default: stdout)");
  };

  auto* solve = app.add_subcommand("solve", "solve one instance and write x, y_numeric[, y_exact]");
  add_common(solve);
  solve->add_option("--n", spec.n, "number of mesh intervals N (divisible by 4)")->capture_default_str();
  solve->add_option("--eps", spec.eps, "perturbation parameter, e.g. 2^-10 or 0.001")->capture_default_str();

  auto* table = app.add_subcommand("table", "convergence table E_N / Ord for N = 2^k");
  add_common(table);
  table->add_option("--k", spec.k, "k range kmin..kmax")->capture_default_str();
  table->add_option("--eps", spec.eps_list, "comma-separated eps list")->capture_default_str();
  table->add_option("--format", spec.format, "csv | md")->capture_default_str();

  auto* residuals = app.add_subcommand("residuals", "per-node |residual| of the scheme at the exact solution");
  add_common(residuals);
  residuals->add_option("--n", spec.n, "number of mesh intervals N")->capture_default_str();
  residuals->add_option("--eps", spec.eps, "perturbation parameter")->capture_default_str();

  auto* mesh_dump = app.add_subcommand("mesh-dump", "write the Shishkin mesh as index, x, h");
  mesh_dump->add_option("--n", spec.n, "number of mesh intervals N")->capture_default_str();
  mesh_dump->add_option("--eps", spec.eps, "perturbation parameter")->capture_default_str();
  mesh_dump->add_option("--m", spec.m, "lower bound m on f_y (default: from --problem)");
  mesh_dump->add_option("--problem", spec.problem, "take m from this problem")->capture_default_str();
  mesh_dump->add_option("-o,--output", spec.output, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*solve) return cmd_solve(spec);
    if (*table) return cmd_table(spec);
    if (*residuals) return cmd_residuals(spec);
    if (*mesh_dump) return cmd_mesh_dump(spec);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const layerfit::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const layerfit::SingularPivotError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return kUsageError;
}
