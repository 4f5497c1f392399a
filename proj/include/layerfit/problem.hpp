#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace layerfit {

/// Right-hand side f(x, y; eps) of eps^2 y'' = f(x, y) and its y-derivative.
using RhsFn = std::function<double(double x, double y, double eps)>;

/// Closed-form solution. Takes both x and 1 - x so that the layer at x = 1
/// can be evaluated without cancellation when eps is tiny.
using ExactFn = std::function<double(double x, double one_minus_x, double eps)>;

using GuessFn = std::function<double(double x)>;

/// Lower/upper solutions bracketing the true solution.
struct Bounds {
  double lower;
  double upper;
};

struct ProblemDefinition {
  std::string name;
  RhsFn f;
  RhsFn f_y;
  double m = 1.0;
  double gamma = 1.0;
  ExactFn exact;
  GuessFn initial_guess;
  std::optional<Bounds> bounds;
  double left_value = 0.0;
  double right_value = 0.0;
};

/// The semilinear reaction-diffusion problem
///
///     eps^2 y''(x) = f(x, y),  0 < x < 1,   y(0) = y(1) = 0,
///
/// with f_y >= m > 0. `gamma` is the scheme constant, chosen so that
/// gamma >= f_y on the strip where the solution lives.
///
/// Immutable after construction.
class Problem {
 public:
  explicit Problem(ProblemDefinition def) : def_(std::move(def)) {
    if (!def_.f || !def_.f_y) {
      throw std::invalid_argument("problem '" + def_.name + "': f and f_y are required");
    }
    if (!(def_.m > 0.0)) {
      throw std::invalid_argument("problem '" + def_.name + "': m must be positive");
    }
    if (!(def_.gamma >= def_.m)) {
      throw std::invalid_argument("problem '" + def_.name + "': gamma must satisfy gamma >= m");
    }
    if (def_.left_value != 0.0 || def_.right_value != 0.0) {
      throw std::invalid_argument("problem '" + def_.name +
                                  "': only homogeneous boundary conditions y(0) = y(1) = 0 are supported");
    }
    if (def_.bounds && !(def_.bounds->lower <= def_.bounds->upper)) {
      throw std::invalid_argument("problem '" + def_.name + "': bounds must satisfy lower <= upper");
    }
    if (!def_.initial_guess) {
      def_.initial_guess = [](double) { return 0.0; };
    }
  }

  const std::string& name() const { return def_.name; }
  double m() const { return def_.m; }
  double gamma() const { return def_.gamma; }
  const std::optional<Bounds>& bounds() const { return def_.bounds; }
  bool has_exact() const { return static_cast<bool>(def_.exact); }

  double f(double x, double y, double eps) const { return def_.f(x, y, eps); }
  double f_y(double x, double y, double eps) const { return def_.f_y(x, y, eps); }
  double initial_guess(double x) const { return def_.initial_guess(x); }

  double exact(double x, double one_minus_x, double eps) const {
    if (!def_.exact) {
      throw std::logic_error("problem '" + def_.name + "' has no exact solution");
    }
    return def_.exact(x, one_minus_x, eps);
  }
  double exact_at(double x, double eps) const { return exact(x, 1.0 - x, eps); }

 private:
  ProblemDefinition def_;
};

/// eps^2 y'' = y + 1 - 2 eps^2 + x(x - 1), with a known solution that has
/// boundary layers of width eps at both ends.
inline Problem linear_example() {
  ProblemDefinition def;
  def.name = "linear";
  def.f = [](double x, double y, double eps) { return y + 1.0 - 2.0 * eps * eps + x * (x - 1.0); };
  def.f_y = [](double, double, double) { return 1.0; };
  def.m = 1.0;
  def.gamma = 1.0;
  def.initial_guess = [](double) { return -0.5; };
  def.exact = [](double x, double one_minus_x, double eps) {
    // (e^{-x/eps} + e^{-(1-x)/eps}) / (1 + e^{-1/eps}) - x(x-1) - 1
    const double layer = (std::exp(-x / eps) + std::exp(-one_minus_x / eps)) / (1.0 + std::exp(-1.0 / eps));
    return layer + x * one_minus_x - 1.0;
  };
  return Problem(std::move(def));
}

/// eps^2 y'' = y^3 + y - 2. No closed form; the reduced solution is y = 1.
inline Problem cubic_example() {
  ProblemDefinition def;
  def.name = "cubic";
  def.f = [](double, double y, double) { return y * y * y + y - 2.0; };
  def.f_y = [](double, double y, double) { return 3.0 * y * y + 1.0; };
  def.m = 1.0;
  def.gamma = 4.0;
  def.initial_guess = [](double) { return 1.0; };
  // y = 0 gives f = -2 <= 0, y = 1 gives f = 0: a lower/upper pair.
  def.bounds = Bounds{0.0, 1.0};
  return Problem(std::move(def));
}

struct ValidationReport {
  double min_f_y = std::numeric_limits<double>::infinity();
  double max_f_y = -std::numeric_limits<double>::infinity();
  /// max f_y over the strip used for the gamma check
  double max_f_y_gamma_strip = -std::numeric_limits<double>::infinity();
  bool lower_bound_holds = false;
  bool gamma_dominates = false;
  int samples = 0;

  bool ok() const { return lower_bound_holds && gamma_dominates; }
};

/// Samples f_y on a regular grid of roughly `sample_count` points.
///
/// f_y >= m is checked on [0,1] x [y_L - 1, y_U + 1] (or [0,1] x [-2, 2]
/// without bounds). gamma >= f_y is checked on [0,1] x [y_L, y_U], the
/// bracket the solution is known to lie in, or on [-2, 2] without bounds.
/// Violations are reported, never thrown.
inline ValidationReport validate(const Problem& problem, int sample_count, double eps = 1.0 / 1024.0) {
  if (sample_count < 1) {
    throw std::invalid_argument("validate: sample_count must be >= 1");
  }
  const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(sample_count)))));
  auto coord = [side](int k, double lo, double hi) {
    return side == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(k) / (side - 1);
  };

  double wide_lo = -2.0, wide_hi = 2.0;
  double tight_lo = -2.0, tight_hi = 2.0;
  if (const auto& b = problem.bounds()) {
    wide_lo = b->lower - 1.0;
    wide_hi = b->upper + 1.0;
    tight_lo = b->lower;
    tight_hi = b->upper;
  }

  ValidationReport report;
  for (int i = 0; i < side; ++i) {
    const double x = coord(i, 0.0, 1.0);
    for (int j = 0; j < side; ++j) {
      const double wide = problem.f_y(x, coord(j, wide_lo, wide_hi), eps);
      const double tight = problem.f_y(x, coord(j, tight_lo, tight_hi), eps);
      report.min_f_y = std::min({report.min_f_y, wide, tight});
      report.max_f_y = std::max({report.max_f_y, wide, tight});
      report.max_f_y_gamma_strip = std::max(report.max_f_y_gamma_strip, tight);
      report.samples += 1;
    }
  }
  report.lower_bound_holds = report.min_f_y >= problem.m();
  report.gamma_dominates = problem.gamma() >= report.max_f_y_gamma_strip;
  return report;
}

}  // namespace layerfit
