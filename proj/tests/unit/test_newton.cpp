#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "layerfit/convergence.hpp"
#include "layerfit/newton.hpp"
#include "unit/oracles.hpp"

using namespace layerfit;

namespace {

Problem shifted_linear(double gamma, double c) {
  ProblemDefinition def;
  def.name = "shifted-linear";
  def.f = [gamma, c](double, double y, double) { return gamma * (y - c); };
  def.f_y = [gamma](double, double, double) { return gamma; };
  def.m = gamma;
  def.gamma = gamma;
  def.exact = [gamma, c](double x, double xc, double eps) {
    const double beta = std::sqrt(gamma) / eps;
    return c * (1.0 - (std::exp(-beta * x) + std::exp(-beta * xc)) / (1.0 + std::exp(-beta)));
  };
  return Problem(def);
}

std::vector<std::vector<double>> to_dense(const TridiagonalMatrix<double>& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = m.diag[i];
    if (i > 0) a[i][i - 1] = m.lower[i - 1];
    if (i + 1 < n) a[i][i + 1] = m.upper[i];
  }
  return a;
}

// Chord iteration y <- y - J_gamma^{-1} T(y), where J_gamma freezes f_y at
// gamma. Started from an upper (lower) solution it decreases (increases)
// monotonically to the discrete solution.
struct MonotoneResult {
  std::vector<double> y;
  double worst_reversal = 0.0;  // largest step against the expected direction
};

MonotoneResult monotone_iteration(const Problem& p, const ShishkinMesh& mesh, Scheme s, double start) {
  const auto frozen = shifted_linear(p.gamma(), 0.0);
  const auto c = coefficients(mesh, p.gamma());
  const std::size_t size = mesh.points().size();
  std::vector<double> y(size, start);
  y.front() = y.back() = 0.0;
  const auto jac = to_dense(jacobian(s, frozen, mesh, c, y));
  MonotoneResult out;
  for (int it = 0; it < 2000; ++it) {
    const auto r = residual(s, p, mesh, c, y);
    const auto dy = oracle::dense_solve(jac, r.values);
    double change = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double next = y[i] - dy[i];
      out.worst_reversal = std::max(out.worst_reversal, start > 0.5 ? next - y[i] : y[i] - next);
      change = std::max(change, std::abs(next - y[i]));
      y[i] = next;
    }
    if (change < 1e-15) break;
  }
  out.y = y;
  return out;
}

}  // namespace

TEST(Newton, LinearProblemTakesOneStep) {
  const auto p = linear_example();
  for (double eps : {0x1p-3, 0x1p-5}) {
    for (Scheme s : {Scheme::F, Scheme::G}) {
      const auto sol = solve(p, build_shishkin(64, eps, p.m()), s);
      EXPECT_EQ(sol.iterations, 1) << scheme_name(s) << " eps=" << eps;
      EXPECT_LE(sol.final_residual, 1e-12);
      EXPECT_FALSE(sol.at_roundoff_floor);
    }
  }
}

TEST(Newton, ReproducesNodallyExactSolution) {
  const auto p = shifted_linear(2.0, -0.3);
  for (double eps : {0x1p-3, 0x1p-8, 0x1p-20}) {
    const auto mesh = build_shishkin(64, eps, p.m());
    for (Scheme s : {Scheme::F, Scheme::G}) {
      const auto sol = solve(p, mesh, s);
      EXPECT_LE(error_exact(sol, p), 1e-12) << scheme_name(s) << " eps=" << eps;
    }
  }
}

TEST(Newton, CubicMatchesMonotoneIteration) {
  const auto p = cubic_example();
  for (double eps : {0x1p-3, 0x1p-6, 0x1p-10}) {
    const auto mesh = build_shishkin(64, eps, p.m());
    for (Scheme s : {Scheme::F, Scheme::G}) {
      const auto sol = solve(p, mesh, s);
      const auto from_above = monotone_iteration(p, mesh, s, 1.0);
      const auto from_below = monotone_iteration(p, mesh, s, 0.0);
      // reversals at rounding level only
      EXPECT_LE(from_above.worst_reversal, 1e-13) << scheme_name(s) << " eps=" << eps;
      EXPECT_LE(from_below.worst_reversal, 1e-13) << scheme_name(s) << " eps=" << eps;
      for (std::size_t i = 0; i < sol.values.size(); ++i) {
        EXPECT_GE(sol.values[i], 0.0);
        EXPECT_LE(sol.values[i], 1.0);
        EXPECT_NEAR(sol.values[i], from_above.y[i], 1e-10) << scheme_name(s) << " eps=" << eps << " i=" << i;
        EXPECT_NEAR(sol.values[i], from_below.y[i], 1e-10) << scheme_name(s) << " eps=" << eps << " i=" << i;
      }
    }
  }
}

TEST(Newton, SolutionIndependentOfStart) {
  std::mt19937_64 rng(3);
  for (const auto& p : {linear_example(), cubic_example()}) {
    const double upper = p.bounds() ? p.bounds()->upper : 1.0;
    for (int n : {64, 256, 1024}) {
      for (double eps : {0x1p-3, 0x1p-10, 0x1p-30}) {
        const auto mesh = build_shishkin(n, eps, p.m());
        const auto size = static_cast<std::size_t>(n) + 1;
        for (Scheme s : {Scheme::F, Scheme::G}) {
          const auto ref = solve(p, mesh, s);
          std::vector<std::vector<double>> starts;
          for (double v : {0.0, upper, 0.5, -0.5, 1.5}) starts.emplace_back(size, v);
          starts.push_back(oracle::random_state(rng, size, 0.0, 1.0));
          for (const auto& start : starts) {
            const auto sol = solve(p, mesh, s, SolveConfig{}, start);
            double diff = 0.0;
            for (std::size_t i = 0; i < size; ++i) diff = std::max(diff, std::abs(sol.values[i] - ref.values[i]));
            EXPECT_LE(diff, 1e-9) << p.name() << ' ' << scheme_name(s) << " n=" << n << " eps=" << eps;
          }
        }
      }
    }
  }
}

TEST(Newton, ResidualSmallInBothForms) {
  for (const auto& p : {linear_example(), cubic_example()}) {
    for (double eps : {0x1p-3, 0x1p-6, 0x1p-10}) {
      const auto mesh = build_shishkin(256, eps, p.m());
      for (Scheme s : {Scheme::F, Scheme::G}) {
        const auto sol = solve(p, mesh, s);
        const auto c = coefficients(mesh, p.gamma());
        const double r = residual(s, p, mesh, c, sol.values).max_norm();
        EXPECT_EQ(r, sol.final_residual);
        EXPECT_TRUE(r <= 1e-12 || sol.at_roundoff_floor) << p.name() << ' ' << scheme_name(s) << " eps=" << eps;
        EXPECT_LE(residual_direct(s, p, mesh, sol.values).max_norm(), 1e-10) << p.name() << ' ' << scheme_name(s);
      }
    }
  }
}

TEST(Newton, SmallEpsilonConverges) {
  for (const auto& p : {linear_example(), cubic_example()}) {
    for (double eps : {0x1p-20, 0x1p-30, 0x1p-45}) {
      for (Scheme s : {Scheme::F, Scheme::G}) {
        const auto sol = solve(p, build_shishkin(1024, eps, p.m()), s);
        EXPECT_TRUE(std::isfinite(sol.final_residual));
        EXPECT_LE(sol.iterations, 50);
        for (double v : sol.values) ASSERT_TRUE(std::isfinite(v));
      }
    }
  }
}

TEST(Newton, Deterministic) {
  const auto p = cubic_example();
  const auto mesh = build_shishkin(512, 0x1p-12, p.m());
  const auto a = solve(p, mesh, Scheme::G);
  const auto b = solve(p, mesh, Scheme::G);
  ASSERT_EQ(a.values.size(), b.values.size());
  EXPECT_EQ(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)), 0);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Newton, ReportsNonConvergence) {
  const auto p = cubic_example();
  const auto mesh = build_shishkin(64, 0x1p-6, p.m());
  SolveConfig config;
  config.max_iter = 1;
  config.tol = 1e-15;
  try {
    solve(p, mesh, Scheme::F, config, std::vector<double>(65, 5.0));
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_GT(e.last_residual(), 1e-15);
  }
}

TEST(Newton, RejectsBadConfiguration) {
  const auto p = linear_example();
  const auto mesh = build_shishkin(16, 0.1, p.m());
  SolveConfig bad_tol;
  bad_tol.tol = 0.0;
  EXPECT_THROW(solve(p, mesh, Scheme::F, bad_tol), std::invalid_argument);
  SolveConfig bad_iter;
  bad_iter.max_iter = 0;
  EXPECT_THROW(solve(p, mesh, Scheme::F, bad_iter), std::invalid_argument);
  EXPECT_THROW(solve(p, mesh, Scheme::F, SolveConfig{}, std::vector<double>(3, 0.0)), std::invalid_argument);
}
