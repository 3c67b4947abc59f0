#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "optohmf/error.hpp"
#include "optohmf/fit.hpp"

using namespace optohmf;

TEST(PowerLaw, ExactQuarterLaw) {
  RealVec x, y;
  for (int i = 0; i < 7; ++i) {
    x.push_back(2e-8 * std::pow(10.0, i / 6.0));
    y.push_back(std::pow(x.back(), -0.25));
  }
  const FitResult f = powerlaw_fit(x, y);
  EXPECT_NEAR(f.exponent, -0.25, 1e-12);
  EXPECT_NEAR(f.prefactor, 1.0, 1e-10);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  ASSERT_EQ(f.residuals.size(), 7u);
  for (double r : f.residuals) EXPECT_LT(std::abs(r), 1e-12);
}

TEST(PowerLawProperty, NoiselessExponents) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0), logx(-3.0, 3.0), pre(0.1, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double b = u(rng), a = pre(rng);
    RealVec x(8), y(8);
    for (int i = 0; i < 8; ++i) {
      x[i] = std::pow(10.0, logx(rng));
      y[i] = a * std::pow(x[i], b);
    }
    if (*std::max_element(x.begin(), x.end()) / *std::min_element(x.begin(), x.end()) < 1.5) continue;
    const FitResult f = powerlaw_fit(x, y);
    EXPECT_NEAR(f.exponent, b, 1e-10);
    EXPECT_NEAR(f.prefactor / a, 1.0, 1e-9);
  }
}

TEST(PowerLawProperty, NoisyExponentsWithinThreeSigma) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.02);
  int outside = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const double b = -2.0 + 4.0 * trial / (trials - 1.0);
    RealVec x(10), y(10);
    for (int i = 0; i < 10; ++i) {
      x[i] = std::pow(10.0, -1.0 + 0.2 * i);
      y[i] = 3.0 * std::pow(x[i], b) * (1.0 + noise(rng));
    }
    const FitResult f = powerlaw_fit(x, y);
    if (std::abs(f.exponent - b) > 3.0 * f.exponent_stderr) ++outside;
  }
  // Student-t with 8 dof puts ~1.7% beyond 3 standard errors.
  EXPECT_LT(outside, 40);
}

TEST(PowerLaw, Errors) {
  const RealVec three{1.0, 2.0, 3.0};
  EXPECT_THROW(powerlaw_fit(three, three), FitError);
  const RealVec x{1.0, 2.0, 3.0, 4.0}, bad{1.0, -2.0, 3.0, 4.0}, same{2.0, 2.0, 2.0, 2.0};
  EXPECT_THROW(powerlaw_fit(x, bad), FitError);
  EXPECT_THROW(powerlaw_fit(bad, x), FitError);
  EXPECT_THROW(powerlaw_fit(same, x), FitError);
  EXPECT_THROW(powerlaw_fit(x, three), FitError);
}

TEST(LinearFit, KnownLine) {
  const RealVec x{0.0, 1.0, 2.0, 3.0, 4.0};
  RealVec y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const LineFit f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.5, 1e-14);
  EXPECT_NEAR(f.intercept, -1.0, 1e-14);
  EXPECT_NEAR(f.rms_residual, 0.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);

  // sxx = 10, sxy = 10, residuals 0.8, -1.2, 0.8, -1.2, 0.8
  const RealVec yn{1.0, 0.0, 3.0, 2.0, 5.0};
  const LineFit g = linear_fit(x, yn);
  EXPECT_NEAR(g.slope, 1.0, 1e-14);
  EXPECT_NEAR(g.intercept, 0.2, 1e-14);
  EXPECT_NEAR(g.slope_stderr, 0.4, 1e-14);
  EXPECT_NEAR(g.rms_residual, std::sqrt(4.8 / 5.0), 1e-14);
  EXPECT_THROW(linear_fit(RealVec{1.0}, RealVec{1.0}), FitError);
}
