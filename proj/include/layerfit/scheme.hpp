#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "layerfit/mesh.hpp"
#include "layerfit/problem.hpp"
#include "layerfit/tridiag.hpp"

namespace layerfit {

/// Scheme F samples f at interval midpoints; scheme G samples f at nodes
/// with weights (1, 2, 1).
enum class Scheme { F, G };

inline const char* scheme_name(Scheme s) { return s == Scheme::F ? "f" : "g"; }

/// Per-interval fitted coefficients. Index k refers to the interval
/// [x_k, x_{k+1}] of length h = steps[k], so a node i couples interval i-1
/// on its left with interval i on its right.
///
///   a = beta / sinh(beta h),  d = beta / tanh(beta h),
///   delta_d = d - a = beta * t,  (a + d) / 2 = beta / (2 t),
///   t = tanh(beta h / 2),  inv_sinh = 1 / sinh(beta h) = a / beta.
///
/// Everything is evaluated through t and e^{-beta h}; a and inv_sinh
/// underflow to zero for beta h above ~745, which is the correct limit.
struct SchemeCoefficients {
  double beta = 0.0;
  std::vector<double> a;
  std::vector<double> d;
  std::vector<double> delta_d;
  std::vector<double> t;
  std::vector<double> inv_sinh;

  std::size_t size() const { return t.size(); }
};

namespace detail {

/// 1 / sinh(z) for z > 0 without overflow.
inline double inv_sinh(double z) {
  if (z <= 1.0) return 1.0 / std::sinh(z);
  const double e = std::exp(-z);
  return 2.0 * e / -std::expm1(-2.0 * z);
}

inline void check_state(const ShishkinMesh& mesh, const SchemeCoefficients& coeffs, std::span<const double> y) {
  const auto n = static_cast<std::size_t>(mesh.intervals());
  if (y.size() != n + 1) {
    throw std::invalid_argument("nodal vector has " + std::to_string(y.size()) + " entries, mesh needs " +
                                std::to_string(n + 1));
  }
  if (coeffs.size() != n) {
    throw std::invalid_argument("scheme coefficients do not match the mesh (" + std::to_string(coeffs.size()) +
                                " intervals vs " + std::to_string(n) + ")");
  }
}

}  // namespace detail

inline SchemeCoefficients coefficients(const ShishkinMesh& mesh, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gamma must be positive");
  }
  SchemeCoefficients c;
  c.beta = std::sqrt(gamma) / mesh.epsilon();
  const auto steps = mesh.steps();
  const std::size_t n = steps.size();
  c.a.resize(n);
  c.d.resize(n);
  c.delta_d.resize(n);
  c.t.resize(n);
  c.inv_sinh.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = c.beta * steps[k];
    c.t[k] = std::tanh(0.5 * z);
    c.inv_sinh[k] = detail::inv_sinh(z);
    c.a[k] = c.beta * c.inv_sinh[k];
    c.d[k] = c.beta / std::tanh(z);
    c.delta_d[k] = c.beta * c.t[k];
  }
  return c;
}

/// (F y)_i or (G y)_i at every node; entries 0 and N hold y_0 and y_N.
struct Residual {
  std::vector<double> values;

  double max_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Scheme F:
///
///   F_i = gamma / (t_i + t_{i+1}) * [ (y_{i-1} - y_i) / (2 t_i) - (y_i - y_{i+1}) / (2 t_{i+1})
///                                     - (t_i fbar_{i-1/2} + t_{i+1} fbar_{i+1/2}) / gamma ]
///
/// with fbar evaluated at interval midpoints (x and y averaged). Identical to
/// the sinh/tanh coefficient form, divided through by beta.
inline Residual residual_f(const Problem& problem, const ShishkinMesh& mesh, const SchemeCoefficients& coeffs,
                           std::span<const double> y) {
  detail::check_state(mesh, coeffs, y);
  const auto x = mesh.points();
  const auto& t = coeffs.t;
  const double gamma = problem.gamma();
  const double eps = mesh.epsilon();
  const std::size_t n = t.size();

  std::vector<double> fbar(n);
  for (std::size_t k = 0; k < n; ++k) {
    fbar[k] = problem.f(0.5 * (x[k] + x[k + 1]), 0.5 * (y[k] + y[k + 1]), eps);
  }

  Residual r;
  r.values.resize(n + 1);
  r.values[0] = y[0];
  r.values[n] = y[n];
  for (std::size_t i = 1; i < n; ++i) {
    const double tl = t[i - 1], tr = t[i];
    const double bracket = (y[i - 1] - y[i]) / (2.0 * tl) - (y[i] - y[i + 1]) / (2.0 * tr) -
                           (tl * fbar[i - 1] + tr * fbar[i]) / gamma;
    r.values[i] = gamma / (tl + tr) * bracket;
  }
  return r;
}

/// Scheme G, regrouped with 3a + d = 4a + delta_d and divided through by beta:
///
///   G_i = 4 gamma / (t_i + t_{i+1}) * [ s_i (y_{i-1} - y_i) - s_{i+1} (y_i - y_{i+1}) ]
///         + gamma (y_{i-1} - 2 y_i + y_{i+1}) - (f_{i-1} + 2 f_i + f_{i+1}),
///
/// s = 1 / sinh(beta h), f_j = f(x_j, y_j).
inline Residual residual_g(const Problem& problem, const ShishkinMesh& mesh, const SchemeCoefficients& coeffs,
                           std::span<const double> y) {
  detail::check_state(mesh, coeffs, y);
  const auto x = mesh.points();
  const auto& t = coeffs.t;
  const auto& s = coeffs.inv_sinh;
  const double gamma = problem.gamma();
  const double eps = mesh.epsilon();
  const std::size_t n = t.size();

  std::vector<double> fv(n + 1);
  for (std::size_t j = 0; j <= n; ++j) fv[j] = problem.f(x[j], y[j], eps);

  Residual r;
  r.values.resize(n + 1);
  r.values[0] = y[0];
  r.values[n] = y[n];
  for (std::size_t i = 1; i < n; ++i) {
    const double scale = 4.0 * gamma / (t[i - 1] + t[i]);
    const double left = y[i - 1] - y[i];
    const double right = y[i] - y[i + 1];
    r.values[i] = scale * (s[i - 1] * left - s[i] * right) + gamma * (left - right) -
                  (fv[i - 1] + 2.0 * fv[i] + fv[i + 1]);
  }
  return r;
}

/// Exact Jacobian of residual_f. Rows 0 and N are identity rows.
inline TridiagonalMatrix<double> jacobian_f(const Problem& problem, const ShishkinMesh& mesh,
                                            const SchemeCoefficients& coeffs, std::span<const double> y) {
  detail::check_state(mesh, coeffs, y);
  const auto x = mesh.points();
  const auto& t = coeffs.t;
  const double gamma = problem.gamma();
  const double eps = mesh.epsilon();
  const std::size_t n = t.size();

  // d fbar_k / d y_k = d fbar_k / d y_{k+1} = f_y(midpoint) / 2
  std::vector<double> fy(n);
  for (std::size_t k = 0; k < n; ++k) {
    fy[k] = problem.f_y(0.5 * (x[k] + x[k + 1]), 0.5 * (y[k] + y[k + 1]), eps);
  }

  TridiagonalMatrix<double> jac(n + 1);
  jac.diag[0] = 1.0;
  jac.diag[n] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double tl = t[i - 1], tr = t[i];
    const double s = gamma / (tl + tr);
    jac.lower[i - 1] = s * (0.5 / tl - 0.5 * tl * fy[i - 1] / gamma);
    jac.upper[i] = s * (0.5 / tr - 0.5 * tr * fy[i] / gamma);
    jac.diag[i] = -s * (0.5 / tl + 0.5 / tr + 0.5 * (tl * fy[i - 1] + tr * fy[i]) / gamma);
  }
  return jac;
}

/// Exact Jacobian of residual_g. Rows 0 and N are identity rows.
inline TridiagonalMatrix<double> jacobian_g(const Problem& problem, const ShishkinMesh& mesh,
                                            const SchemeCoefficients& coeffs, std::span<const double> y) {
  detail::check_state(mesh, coeffs, y);
  const auto x = mesh.points();
  const auto& t = coeffs.t;
  const auto& s = coeffs.inv_sinh;
  const double gamma = problem.gamma();
  const double eps = mesh.epsilon();
  const std::size_t n = t.size();

  std::vector<double> fy(n + 1);
  for (std::size_t j = 0; j <= n; ++j) fy[j] = problem.f_y(x[j], y[j], eps);

  TridiagonalMatrix<double> jac(n + 1);
  jac.diag[0] = 1.0;
  jac.diag[n] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double scale = 4.0 * gamma / (t[i - 1] + t[i]);
    jac.lower[i - 1] = scale * s[i - 1] + gamma - fy[i - 1];
    jac.upper[i] = scale * s[i] + gamma - fy[i + 1];
    jac.diag[i] = -scale * (s[i - 1] + s[i]) - 2.0 * gamma - 2.0 * fy[i];
  }
  return jac;
}

inline Residual residual(Scheme scheme, const Problem& problem, const ShishkinMesh& mesh,
                         const SchemeCoefficients& coeffs, std::span<const double> y) {
  return scheme == Scheme::F ? residual_f(problem, mesh, coeffs, y) : residual_g(problem, mesh, coeffs, y);
}

inline TridiagonalMatrix<double> jacobian(Scheme scheme, const Problem& problem, const ShishkinMesh& mesh,
                                          const SchemeCoefficients& coeffs, std::span<const double> y) {
  return scheme == Scheme::F ? jacobian_f(problem, mesh, coeffs, y) : jacobian_g(problem, mesh, coeffs, y);
}

// ---------------------------------------------------------------------------
// Textbook forms: the residuals written directly in a_i, d_i, delta_d_i, with
// the coefficients recomputed from plain sinh/tanh. They lose accuracy when
// beta h is large (sinh overflows past ~710, d - a cancels for small beta h)
// and exist as an independent cross-check of the stable forms above.
// ---------------------------------------------------------------------------

struct DirectCoefficients {
  std::vector<double> a, d, delta_d;
};

inline DirectCoefficients direct_coefficients(const ShishkinMesh& mesh, double gamma) {
  const double beta = std::sqrt(gamma) / mesh.epsilon();
  const auto steps = mesh.steps();
  DirectCoefficients c;
  for (double h : steps) {
    const double a = beta / std::sinh(beta * h);
    const double d = beta / std::tanh(beta * h);
    c.a.push_back(a);
    c.d.push_back(d);
    c.delta_d.push_back(d - a);
  }
  return c;
}

inline Residual residual_f_direct(const Problem& problem, const ShishkinMesh& mesh, std::span<const double> y) {
  const auto n = static_cast<std::size_t>(mesh.intervals());
  if (y.size() != n + 1) throw std::invalid_argument("nodal vector does not match the mesh");
  const auto c = direct_coefficients(mesh, problem.gamma());
  const auto x = mesh.points();
  const double gamma = problem.gamma();
  const double eps = mesh.epsilon();

  Residual r;
  r.values.resize(n + 1);
  r.values[0] = y[0];
  r.values[n] = y[n];
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t l = i - 1, rr = i;  // left and right interval
    const double f_left = problem.f(0.5 * (x[i - 1] + x[i]), 0.5 * (y[i - 1] + y[i]), eps);
    const double f_right = problem.f(0.5 * (x[i] + x[i + 1]), 0.5 * (y[i] + y[i + 1]), eps);
    const double wl = 0.5 * (c.a[l] + c.d[l]);
    const double wr = 0.5 * (c.a[rr] + c.d[rr]);
    const double bracket = wl * y[i - 1] - (wl + wr) * y[i] + wr * y[i + 1] - c.delta_d[l] / gamma * f_left -
                           c.delta_d[rr] / gamma * f_right;
    r.values[i] = gamma / (c.delta_d[l] + c.delta_d[rr]) * bracket;
  }
  return r;
}

inline Residual residual_g_direct(const Problem& problem, const ShishkinMesh& mesh, std::span<const double> y) {
  const auto n = static_cast<std::size_t>(mesh.intervals());
  if (y.size() != n + 1) throw std::invalid_argument("nodal vector does not match the mesh");
  const auto c = direct_coefficients(mesh, problem.gamma());
  const auto x = mesh.points();
  const double gamma = problem.gamma();
  const double eps = mesh.epsilon();

  Residual r;
  r.values.resize(n + 1);
  r.values[0] = y[0];
  r.values[n] = y[n];
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t l = i - 1, rr = i;
    const double dd = c.delta_d[l] + c.delta_d[rr];
    const double fsum =
        problem.f(x[i - 1], y[i - 1], eps) + 2.0 * problem.f(x[i], y[i], eps) + problem.f(x[i + 1], y[i + 1], eps);
    const double bracket = (3.0 * c.a[l] + c.d[l] + c.delta_d[rr]) * (y[i - 1] - y[i]) -
                           (3.0 * c.a[rr] + c.d[rr] + c.delta_d[l]) * (y[i] - y[i + 1]) - fsum / gamma * dd;
    r.values[i] = gamma / dd * bracket;
  }
  return r;
}

inline Residual residual_direct(Scheme scheme, const Problem& problem, const ShishkinMesh& mesh,
                                std::span<const double> y) {
  return scheme == Scheme::F ? residual_f_direct(problem, mesh, y) : residual_g_direct(problem, mesh, y);
}

}  // namespace layerfit
