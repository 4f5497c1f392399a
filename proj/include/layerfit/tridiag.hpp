#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace layerfit {

class SingularPivotError : public std::runtime_error {
 public:
  SingularPivotError(std::size_t row, double pivot)
      : std::runtime_error("tridiagonal solve: near-singular pivot " + std::to_string(pivot) + " at row " +
                           std::to_string(row)),
        row_(row),
        pivot_(pivot) {}

  std::size_t row() const { return row_; }
  double pivot() const { return pivot_; }

 private:
  std::size_t row_;
  double pivot_;
};

/// Square tridiagonal matrix of order n. Row i is
/// lower[i-1] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1].
template <typename Real = double>
struct TridiagonalMatrix {
  std::vector<Real> lower;  // n - 1
  std::vector<Real> diag;   // n
  std::vector<Real> upper;  // n - 1

  TridiagonalMatrix() = default;
  explicit TridiagonalMatrix(std::size_t n)
      : lower(n > 0 ? n - 1 : 0, Real(0)), diag(n, Real(0)), upper(n > 0 ? n - 1 : 0, Real(0)) {}

  std::size_t size() const { return diag.size(); }

  void check_shape() const {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() + 1 != n || upper.size() + 1 != n) {
      throw std::invalid_argument("tridiagonal matrix: inconsistent band sizes");
    }
  }

  std::vector<Real> apply(std::span<const Real> x) const {
    check_shape();
    const std::size_t n = size();
    if (x.size() != n) {
      throw std::invalid_argument("tridiagonal apply: dimension mismatch");
    }
    std::vector<Real> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real v = diag[i] * x[i];
      if (i > 0) v += lower[i - 1] * x[i - 1];
      if (i + 1 < n) v += upper[i] * x[i + 1];
      out[i] = v;
    }
    return out;
  }

  /// max_i sum_j |a_ij|
  Real norm_inf() const {
    const std::size_t n = size();
    Real best(0);
    for (std::size_t i = 0; i < n; ++i) {
      Real row = std::abs(diag[i]);
      if (i > 0) row += std::abs(lower[i - 1]);
      if (i + 1 < n) row += std::abs(upper[i]);
      if (row > best) best = row;
    }
    return best;
  }
};

/// Thomas algorithm, no pivoting. Stable for the diagonally dominant
/// M-matrices the schemes produce.
template <typename Real>
std::vector<Real> solve(const TridiagonalMatrix<Real>& mat, std::span<const Real> rhs) {
  mat.check_shape();
  const std::size_t n = mat.size();
  if (rhs.size() != n) {
    throw std::invalid_argument("tridiagonal solve: rhs has " + std::to_string(rhs.size()) + " entries, expected " +
                                std::to_string(n));
  }
  constexpr double kTinyPivot = 1e-300;

  std::vector<Real> c(n, Real(0));  // modified super-diagonal
  std::vector<Real> x(n);
  Real pivot = mat.diag[0];
  if (!(std::abs(pivot) >= kTinyPivot)) throw SingularPivotError(0, static_cast<double>(pivot));
  if (n > 1) c[0] = mat.upper[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = mat.diag[i] - mat.lower[i - 1] * c[i - 1];
    if (!(std::abs(pivot) >= kTinyPivot)) throw SingularPivotError(i, static_cast<double>(pivot));
    if (i + 1 < n) c[i] = mat.upper[i] / pivot;
    x[i] = (rhs[i] - mat.lower[i - 1] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] -= c[i] * x[i + 1];
  }
  return x;
}

template <typename Real>
std::vector<Real> solve(const TridiagonalMatrix<Real>& mat, const std::vector<Real>& rhs) {
  return solve(mat, std::span<const Real>(rhs));
}

}  // namespace layerfit
