#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "layerfit/problem.hpp"
#include "unit/oracles.hpp"

using namespace layerfit;

TEST(Problem, LinearExactVanishesOnBoundary) {
  const auto p = linear_example();
  EXPECT_EQ(p.exact_at(0.0, 0x1p-3), 0.0);
  for (int k : {1, 3, 5, 10, 20, 30, 45}) {
    const double eps = std::ldexp(1.0, -k);
    EXPECT_NEAR(p.exact_at(0.0, eps), 0.0, 1e-12) << "eps = 2^-" << k;
    EXPECT_NEAR(p.exact_at(1.0, eps), 0.0, 1e-12) << "eps = 2^-" << k;
  }
}

TEST(Problem, LinearExactMatchesHighPrecisionFormula) {
  const auto p = linear_example();
  for (double x : {0.5, 0.01, 0.3, 0.97}) {
    for (double eps : {0x1p-3, 0x1p-5, 0x1p-10}) {
      const double want = static_cast<double>(oracle::linear_exact(oracle::Big(x), oracle::Big(eps)));
      EXPECT_NEAR(p.exact_at(x, eps), want, 1e-15) << "x=" << x << " eps=" << eps;
    }
  }
}

TEST(Problem, ExactSolutionsSatisfyTheOde) {
  // eps^2 y'' - f(x, y) with y'' from a central difference of the formula
  for (const auto& p : {linear_example()}) {
    for (double eps : {0x1p-3, 0x1p-5, 0x1p-7}) {
      const double h = 1e-5;
      for (int i = 0; i <= 100; ++i) {
        const double x = std::clamp(i / 100.0, h, 1.0 - h);
        const double ypp = (p.exact_at(x - h, eps) - 2.0 * p.exact_at(x, eps) + p.exact_at(x + h, eps)) / (h * h);
        EXPECT_LE(std::abs(eps * eps * ypp - p.f(x, p.exact_at(x, eps), eps)), 1e-6) << "x=" << x << " eps=" << eps;
      }
    }
  }
}

TEST(Problem, LinearConstants) {
  const auto p = linear_example();
  EXPECT_EQ(p.m(), 1.0);
  EXPECT_EQ(p.gamma(), 1.0);
  EXPECT_EQ(p.initial_guess(0.3), -0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(p.f_y(d(rng), d(rng), 0x1p-4), 1.0);
}

TEST(Problem, CubicConstants) {
  const auto p = cubic_example();
  EXPECT_FALSE(p.has_exact());
  EXPECT_EQ(p.gamma(), 4.0);
  EXPECT_EQ(p.m(), 1.0);
  EXPECT_EQ(p.initial_guess(0.2), 1.0);
  ASSERT_TRUE(p.bounds().has_value());
  EXPECT_EQ(p.bounds()->lower, 0.0);
  EXPECT_EQ(p.bounds()->upper, 1.0);
  for (double x : {0.0, 0.25, 1.0}) EXPECT_EQ(p.f(x, 1.0, 0x1p-10), 0.0);
  EXPECT_EQ(p.f_y(0.5, 0.0, 0x1p-10), 1.0);
  EXPECT_THROW(p.exact_at(0.5, 0.1), std::logic_error);
}

TEST(Problem, ValidateBuiltins) {
  const auto lin = validate(linear_example(), 10000);
  EXPECT_TRUE(lin.ok());
  EXPECT_EQ(lin.min_f_y, 1.0);
  EXPECT_EQ(lin.samples, 10000);

  const auto cub = validate(cubic_example(), 10000);
  EXPECT_TRUE(cub.ok());
  // brute force over the same bracket grid: 3y^2 + 1 peaks at y = 1
  double brute = 0.0;
  for (int j = 0; j < 100; ++j) brute = std::max(brute, 3.0 * std::pow(j / 99.0, 2) + 1.0);
  EXPECT_EQ(cub.max_f_y_gamma_strip, brute);
  EXPECT_EQ(cub.max_f_y_gamma_strip, 4.0);
}

TEST(Problem, ValidateReportsViolation) {
  ProblemDefinition def;
  def.name = "bad";
  def.f = [](double, double y, double) { return y; };
  def.f_y = [](double, double, double) { return 1.0; };
  def.m = 2.0;
  def.gamma = 2.0;
  const Problem p(def);
  const auto report = validate(p, 1);
  EXPECT_FALSE(report.lower_bound_holds);
  EXPECT_FALSE(report.ok());
  EXPECT_EQ(report.samples, 1);
  EXPECT_THROW(validate(p, 0), std::invalid_argument);
}

TEST(Problem, RejectsInvalidDefinitions) {
  ProblemDefinition def;
  def.name = "p";
  def.f = [](double, double y, double) { return y; };
  def.f_y = [](double, double, double) { return 1.0; };

  auto bc = def;
  bc.left_value = 1.0;
  EXPECT_THROW(Problem{bc}, std::invalid_argument);

  auto small_gamma = def;
  small_gamma.gamma = 0.5;
  EXPECT_THROW(Problem{small_gamma}, std::invalid_argument);

  auto bad_m = def;
  bad_m.m = 0.0;
  EXPECT_THROW(Problem{bad_m}, std::invalid_argument);

  auto no_f = def;
  no_f.f = nullptr;
  EXPECT_THROW(Problem{no_f}, std::invalid_argument);

  EXPECT_NO_THROW(Problem{def});
}
