#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "layerfit/mesh.hpp"
#include "layerfit/newton.hpp"
#include "layerfit/problem.hpp"
#include "layerfit/scheme.hpp"

namespace layerfit {

struct ReportRow {
  int n = 0;
  double e_n = 0.0;
  std::optional<double> ord;  // absent on the last row
};

/// One block of a convergence table: a fixed problem, scheme and eps,
/// with N = 2^k for consecutive k.
struct ConvergenceReport {
  std::string problem_name;
  Scheme scheme = Scheme::F;
  double epsilon = 0.0;
  std::vector<ReportRow> rows;
};

/// max_i |y(x_i) - y^N_i| against the closed-form solution.
inline double error_exact(const DiscreteSolution& solution, const Problem& problem) {
  if (!problem.has_exact()) {
    throw std::invalid_argument("problem '" + problem.name() + "' has no exact solution");
  }
  const auto x = solution.mesh.points();
  const auto xc = solution.mesh.complements();
  const double eps = solution.mesh.epsilon();
  if (solution.values.size() != x.size()) {
    throw std::invalid_argument("solution does not match its mesh");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err = std::max(err, std::abs(problem.exact(x[i], xc[i], eps) - solution.values[i]));
  }
  return err;
}

/// Values of `fine` at the nodes of `base`. Uses the matching node when the
/// base node is present in the fine mesh (to 1e-14), otherwise linear
/// interpolation between the neighbouring fine nodes.
inline std::vector<double> sample_at_nodes(const DiscreteSolution& fine, const ShishkinMesh& base) {
  const auto xf = fine.mesh.points();
  const auto xb = base.points();
  std::vector<double> out(xb.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < xb.size(); ++i) {
    const double x = xb[i];
    while (j + 1 < xf.size() && xf[j + 1] <= x) ++j;
    if (std::abs(xf[j] - x) <= 1e-14) {
      out[i] = fine.values[j];
    } else if (j + 1 < xf.size() && std::abs(xf[j + 1] - x) <= 1e-14) {
      out[i] = fine.values[j + 1];
    } else {
      const double w = (x - xf[j]) / (xf[j + 1] - xf[j]);
      out[i] = (1.0 - w) * fine.values[j] + w * fine.values[j + 1];
    }
  }
  return out;
}

/// Double-mesh estimate max_i |y^{2N}_S(x_i) - y^N(x_i)| over the base nodes,
/// where y^{2N}_S lives on build_shifted(2N).
inline double error_double_mesh(const Problem& problem, Scheme scheme, int n, double eps,
                                const SolveConfig& config = {}) {
  const auto base_mesh = build_shishkin(n, eps, problem.m());
  const auto fine_mesh = build_shifted(2 * n, eps, problem.m());
  const auto base = solve(problem, base_mesh, scheme, config);
  const auto fine = solve(problem, fine_mesh, scheme, config);
  const auto sampled = sample_at_nodes(fine, base_mesh);
  double err = 0.0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    err = std::max(err, std::abs(sampled[i] - base.values[i]));
  }
  return err;
}

/// Rate with the ln^2 N factor divided out: (ln E_N - ln E_2N) / ln(2k/(k+1)),
/// N = 2^k. Reads 2 for errors behaving like (ln N / N)^2.
inline double ord(double e_n, double e_2n, int k) {
  if (!(e_n > 0.0) || !(e_2n > 0.0)) {
    throw std::invalid_argument("ord: errors must be positive");
  }
  if (k < 1) {
    throw std::invalid_argument("ord: k must be >= 1");
  }
  return (std::log(e_n) - std::log(e_2n)) / std::log(2.0 * k / (k + 1.0));
}

/// E_N for one cell: exact error when the problem has a closed form,
/// double-mesh estimate otherwise.
inline double cell_error(const Problem& problem, Scheme scheme, int n, double eps, const SolveConfig& config) {
  if (problem.has_exact()) {
    return error_exact(solve(problem, build_shishkin(n, eps, problem.m()), scheme, config), problem);
  }
  return error_double_mesh(problem, scheme, n, eps, config);
}

/// Thrown by build_report when a cell fails; carries the rows completed
/// before the first failing N.
class ReportError : public std::runtime_error {
 public:
  ReportError(const std::string& what, ConvergenceReport partial, int failed_n)
      : std::runtime_error(what), partial_(std::move(partial)), failed_n_(failed_n) {}

  const ConvergenceReport& partial() const { return partial_; }
  int failed_n() const { return failed_n_; }

 private:
  ConvergenceReport partial_;
  int failed_n_;
};

/// Rows for N = 2^k_min .. 2^k_max. Cells are computed concurrently and
/// assembled in increasing k.
inline ConvergenceReport build_report(const Problem& problem, Scheme scheme, double eps, int k_min, int k_max,
                                      const SolveConfig& config = {}) {
  if (k_min < 3 || k_max > 20 || k_min > k_max) {
    throw std::invalid_argument("k range must satisfy 3 <= k_min <= k_max <= 20");
  }
  std::vector<std::future<double>> cells;
  for (int k = k_min; k <= k_max; ++k) {
    cells.push_back(std::async(std::launch::async, [&problem, scheme, eps, k, &config] {
      return cell_error(problem, scheme, 1 << k, eps, config);
    }));
  }

  ConvergenceReport report{problem.name(), scheme, eps, {}};
  auto fill_ord = [&report, k_min] {
    for (std::size_t r = 0; r + 1 < report.rows.size(); ++r) {
      report.rows[r].ord = ord(report.rows[r].e_n, report.rows[r + 1].e_n, k_min + static_cast<int>(r));
    }
  };

  std::optional<std::pair<int, std::string>> failure;
  for (int k = k_min; k <= k_max; ++k) {
    auto& cell = cells[static_cast<std::size_t>(k - k_min)];
    try {
      const double e = cell.get();
      if (!failure) report.rows.push_back(ReportRow{1 << k, e, std::nullopt});
    } catch (const std::exception& ex) {
      if (!failure) failure.emplace(1 << k, ex.what());
    }
  }
  fill_ord();
  if (failure) {
    throw ReportError("N = " + std::to_string(failure->first) + ": " + failure->second, std::move(report),
                      failure->first);
  }
  return report;
}

}  // namespace layerfit
