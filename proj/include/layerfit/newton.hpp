#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "layerfit/mesh.hpp"
#include "layerfit/problem.hpp"
#include "layerfit/scheme.hpp"
#include "layerfit/tridiag.hpp"

namespace layerfit {

enum class Damping { none, backtracking };

struct SolveConfig {
  double tol = 1e-12;
  int max_iter = 50;
  Damping damping = Damping::backtracking;
  double min_step = 0x1p-20;

  void check() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(min_step > 0.0) || min_step > 1.0) throw std::invalid_argument("min_step must lie in (0, 1]");
  }
};

struct DiscreteSolution {
  ShishkinMesh mesh;
  std::vector<double> values;
  Scheme scheme = Scheme::F;
  int iterations = 0;
  double final_residual = 0.0;
  /// The residual stalled at rounding level above tol (see solve()).
  bool at_roundoff_floor = false;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, int iterations, double last_residual)
      : std::runtime_error(what), iterations_(iterations), last_residual_(last_residual) {}

  int iterations() const { return iterations_; }
  double last_residual() const { return last_residual_; }

 private:
  int iterations_;
  double last_residual_;
};

namespace detail {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Smallest residual norm distinguishable from rounding noise at state y:
/// a few ulps of the largest term the stencil sums.
inline double roundoff_floor(const TridiagonalMatrix<double>& jac, std::span<const double> y) {
  return 16.0 * std::numeric_limits<double>::epsilon() * jac.norm_inf() * std::max(1.0, max_abs(y));
}

}  // namespace detail

/// Damped Newton iteration y <- y - step * J^{-1} r(y) on the scheme residual.
///
/// Boundary entries of the start vector are forced to zero. A step is
/// accepted as soon as it strictly decreases the residual max-norm; the step
/// length is halved down to `min_step`. Converges when ||r||_inf <= tol, or
/// when ||r||_inf has reached the rounding floor of the stencil (for small
/// steps h with eps^2/h^2 large the floor can exceed 1e-12).
inline DiscreteSolution solve(const Problem& problem, const ShishkinMesh& mesh, Scheme scheme,
                              const SolveConfig& config, std::span<const double> start) {
  config.check();
  const auto n = static_cast<std::size_t>(mesh.intervals());
  if (start.size() != n + 1) {
    throw std::invalid_argument("initial iterate has " + std::to_string(start.size()) + " entries, mesh needs " +
                                std::to_string(n + 1));
  }
  const auto coeffs = coefficients(mesh, problem.gamma());

  std::vector<double> y(start.begin(), start.end());
  y.front() = 0.0;
  y.back() = 0.0;

  auto r = residual(scheme, problem, mesh, coeffs, y);
  double norm = r.max_norm();
  int iter = 0;
  while (true) {
    if (!std::isfinite(norm)) {
      throw NonConvergenceError("Newton iteration produced a non-finite residual", iter, norm);
    }
    if (norm <= config.tol) break;

    const auto jac = jacobian(scheme, problem, mesh, coeffs, y);
    const bool at_floor = iter > 0 && norm <= detail::roundoff_floor(jac, y);
    if (at_floor) {
      // Rounding noise only: a few undamped steps sometimes still land below tol.
      for (int polish = 0; polish < 4 && iter < config.max_iter; ++polish) {
        const auto pj = jacobian(scheme, problem, mesh, coeffs, y);
        const auto step = solve(pj, std::span<const double>(r.values));
        std::vector<double> trial(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) trial[j] = y[j] - step[j];
        auto trial_r = residual(scheme, problem, mesh, coeffs, trial);
        if (!(trial_r.max_norm() < norm)) break;
        y.swap(trial);
        r = std::move(trial_r);
        norm = r.max_norm();
        ++iter;
        if (norm <= config.tol) return DiscreteSolution{mesh, std::move(y), scheme, iter, norm, false};
      }
      return DiscreteSolution{mesh, std::move(y), scheme, iter, norm, true};
    }
    if (iter >= config.max_iter) {
      throw NonConvergenceError("Newton iteration did not converge in " + std::to_string(config.max_iter) +
                                    " iterations (residual " + std::to_string(norm) + ")",
                                iter, norm);
    }

    const auto dy = solve(jac, std::span<const double>(r.values));
    double step = 1.0;
    std::vector<double> trial(y.size());
    Residual trial_r;
    double trial_norm = 0.0;
    while (true) {
      for (std::size_t j = 0; j < y.size(); ++j) trial[j] = y[j] - step * dy[j];
      trial_r = residual(scheme, problem, mesh, coeffs, trial);
      trial_norm = trial_r.max_norm();
      if (config.damping == Damping::none || trial_norm < norm) break;
      if (step * 0.5 < config.min_step) {
        // No decrease along the Newton direction: either we sit on the
        // rounding floor already, or the iteration is stuck.
        if (norm <= 4.0 * detail::roundoff_floor(jac, y)) {
          return DiscreteSolution{mesh, std::move(y), scheme, iter, norm, true};
        }
        throw NonConvergenceError("Newton line search failed to reduce the residual (" + std::to_string(norm) +
                                      ")",
                                  iter, norm);
      }
      step *= 0.5;
    }
    y.swap(trial);
    r = std::move(trial_r);
    norm = trial_norm;
    ++iter;
  }
  return DiscreteSolution{mesh, std::move(y), scheme, iter, norm, false};
}

/// Starts from the problem's initial guess sampled at the nodes.
inline DiscreteSolution solve(const Problem& problem, const ShishkinMesh& mesh, Scheme scheme,
                              const SolveConfig& config = {}) {
  const auto x = mesh.points();
  std::vector<double> start(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) start[j] = problem.initial_guess(x[j]);
  return solve(problem, mesh, scheme, config, start);
}

}  // namespace layerfit
