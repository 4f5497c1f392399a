#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace layerfit {

/// Piecewise-equidistant Shishkin mesh on [0, 1] with N intervals:
/// N/4 fine intervals on [0, lambda], N/2 coarse ones on [lambda, 1 - lambda],
/// N/4 fine ones on [1 - lambda, 1].
///
/// Besides the nodes x_i the mesh keeps 1 - x_i computed without
/// cancellation, and the step sizes as the exact block constants rather than
/// differences of rounded nodes. Both matter once eps drops below ~1e-10,
/// where the fine step near x = 1 is only a few ulps of 1.0.
class ShishkinMesh {
 public:
  int intervals() const { return n_; }
  double epsilon() const { return eps_; }
  double m() const { return m_; }
  double transition() const { return lambda_; }
  int transition_index() const { return n_ / 4; }

  /// x_0 .. x_N
  std::span<const double> points() const { return points_; }
  /// 1 - x_0 .. 1 - x_N
  std::span<const double> complements() const { return complements_; }
  /// h_1 .. h_N stored at [0, N), h_i = x_i - x_{i-1}
  std::span<const double> steps() const { return steps_; }

  double fine_step() const { return steps_.front(); }
  double coarse_step() const { return steps_[static_cast<std::size_t>(n_ / 2)]; }

  friend ShishkinMesh build_mesh_with_transition(int n, double eps, double m, double lambda);

 private:
  int n_ = 0;
  double eps_ = 0.0;
  double m_ = 0.0;
  double lambda_ = 0.0;
  std::vector<double> points_;
  std::vector<double> complements_;
  std::vector<double> steps_;
};

namespace detail {

inline void check_mesh_args(int n, double eps, double m) {
  if (n < 8) {
    throw std::invalid_argument("N must be at least 8 (got " + std::to_string(n) + ")");
  }
  if (n % 4 != 0) {
    throw std::invalid_argument("N must be divisible by 4 (got " + std::to_string(n) + ")");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw std::invalid_argument("m must be positive");
  }
}

}  // namespace detail

/// Three-block mesh for an explicit transition point 0 < lambda <= 1/4.
inline ShishkinMesh build_mesh_with_transition(int n, double eps, double m, double lambda) {
  detail::check_mesh_args(n, eps, m);
  if (!(lambda > 0.0) || lambda > 0.25) {
    throw std::invalid_argument("transition point must lie in (0, 1/4]");
  }

  ShishkinMesh mesh;
  mesh.n_ = n;
  mesh.eps_ = eps;
  mesh.m_ = m;
  mesh.lambda_ = lambda;

  const auto size = static_cast<std::size_t>(n) + 1;
  const int quarter = n / 4;
  const int half = n / 2;
  const double middle = 1.0 - 2.0 * lambda;

  mesh.points_.assign(size, 0.0);
  mesh.complements_.assign(size, 0.0);

  // Left half by per-block affine formulas; right half mirrored so that
  // x_i + x_{N-i} = 1 and 1 - x_{N-i} = x_i hold exactly.
  for (int i = 0; i <= half; ++i) {
    const double x = i <= quarter ? lambda * (static_cast<double>(i) / quarter)
                                  : lambda + middle * (static_cast<double>(i - quarter) / half);
    mesh.points_[static_cast<std::size_t>(i)] = x;
  }
  mesh.points_[static_cast<std::size_t>(half)] = 0.5;
  for (int i = 0; i < half; ++i) {
    const double x = mesh.points_[static_cast<std::size_t>(i)];
    mesh.points_[static_cast<std::size_t>(n - i)] = 1.0 - x;
    mesh.complements_[static_cast<std::size_t>(n - i)] = x;
    mesh.complements_[static_cast<std::size_t>(i)] = 1.0 - x;
  }
  mesh.complements_[static_cast<std::size_t>(half)] = 0.5;

  const double fine = 4.0 * lambda / n;
  const double coarse = 2.0 * middle / n;
  mesh.steps_.assign(static_cast<std::size_t>(n), coarse);
  std::fill_n(mesh.steps_.begin(), quarter, fine);
  std::fill_n(mesh.steps_.end() - quarter, quarter, fine);
  return mesh;
}

/// lambda = min{1/4, 2 eps ln N / sqrt(m)}.
inline double shishkin_transition(int n, double eps, double m) {
  return std::min(0.25, 2.0 * eps * std::log(static_cast<double>(n)) / std::sqrt(m));
}

inline ShishkinMesh build_shishkin(int n, double eps, double m) {
  detail::check_mesh_args(n, eps, m);
  return build_mesh_with_transition(n, eps, m, shishkin_transition(n, eps, m));
}

/// Mesh with n intervals used as the fine partner of an n/2-interval base
/// mesh in the double-mesh error estimate. Its transition point is
/// min{1/4, 2 eps ln(n/2) / sqrt(m)}, i.e. the base mesh's lambda, so base
/// nodes are a subset of this mesh's nodes.
inline ShishkinMesh build_shifted(int n, double eps, double m) {
  detail::check_mesh_args(n, eps, m);
  const double lambda = std::min(0.25, 2.0 * eps * std::log(static_cast<double>(n) / 2.0) / std::sqrt(m));
  return build_mesh_with_transition(n, eps, m, lambda);
}

}  // namespace layerfit
