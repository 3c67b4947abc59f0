#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "optohmf/error.hpp"
#include "optohmf/params.hpp"

using namespace optohmf;

namespace {

PhysParams fig2() { return {100.0, 500.0, 2e-9, 1.0, 1e-8}; }
PhysParams fig5() { return {20.0, 1600.0, 6.3e-8, 0.99, 1e-7}; }

}  // namespace

TEST(Params, Chi0Examples) {
  EXPECT_DOUBLE_EQ(compute_chi0(fig2()), 0.1);
  EXPECT_DOUBLE_EQ(compute_chi0(fig5()), 0.00625);
  PhysParams p = fig2();
  p.b0 = 0.0;
  EXPECT_THROW(compute_chi0(p), ParameterError);
  p = fig2();
  p.delta_hat = 0.0;
  EXPECT_THROW(compute_chi0(p), ParameterError);
}

TEST(Params, ThresholdExamples) {
  EXPECT_DOUBLE_EQ(compute_pth(fig2()), 2e-10);
  EXPECT_DOUBLE_EQ(with_pump_ratio(fig2(), 1.1).p0, 2.2e-10);
  PhysParams p = fig2();
  p.b0 *= 2.0;
  EXPECT_DOUBLE_EQ(compute_pth(p), 1e-10);
}

TEST(Params, DriveExamples) {
  EXPECT_DOUBLE_EQ(compute_drive(fig2()).epsilon_over_omega_r, 10.0);
  PhysParams p = fig2();
  p.p0 = compute_pth(p);
  EXPECT_DOUBLE_EQ(compute_drive(p).epsilon_over_omega_r, 1.0);
  // 0.99 * 6.3e-8 * 20 / 2e-7
  EXPECT_NEAR(compute_drive(fig5()).epsilon_over_omega_r, 6.237, 1e-12);
}

TEST(Params, PotentialScale) { EXPECT_DOUBLE_EQ(potential_scale(fig2()), 500.0 / 4e-8); }

TEST(Params, Validation) {
  EXPECT_TRUE(validate(fig5()).empty());
  const auto warn = validate(fig2());
  ASSERT_EQ(warn.size(), 1u);
  EXPECT_NE(warn[0].find("chi0"), std::string::npos);

  PhysParams p = fig2();
  p.delta_hat = 50.0;
  p.b0 = 1.0;
  EXPECT_EQ(validate(p).size(), 1u);

  for (auto mutate : {+[](PhysParams& q) { q.b0 = -1.0; }, +[](PhysParams& q) { q.delta_hat = 0.5; },
                      +[](PhysParams& q) { q.p0 = 0.0; }, +[](PhysParams& q) { q.R = 0.0; },
                      +[](PhysParams& q) { q.R = 1.5; }, +[](PhysParams& q) { q.omega_r_hat = 0.0; },
                      +[](PhysParams& q) { q.p0 = std::nan(""); }}) {
    PhysParams q = fig2();
    mutate(q);
    EXPECT_THROW(validate(q), ParameterError);
  }
}

TEST(ParamsProperty, DriveTimesThresholdIsPump) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    PhysParams p;
    p.b0 = std::pow(10.0, 3.0 * u(rng) - 1.0);
    p.delta_hat = (u(rng) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, 1.0 + 3.0 * u(rng));
    p.p0 = std::pow(10.0, -12.0 + 6.0 * u(rng));
    p.R = 0.01 + 0.99 * u(rng);
    p.omega_r_hat = std::pow(10.0, -10.0 + 4.0 * u(rng));
    const DerivedParams d = compute_drive(p);
    EXPECT_NEAR(d.epsilon_over_omega_r * compute_pth(p) / p.p0, 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(d.p_th, compute_pth(p));
  }
}

TEST(ParamsProperty, ThresholdIndependentOfDetuning) {
  PhysParams a = fig2(), b = fig2();
  b.delta_hat = 3000.0;
  EXPECT_EQ(compute_pth(a), compute_pth(b));
  // chi0 * p_th = omega_r / (Delta R): it scales as 1/Delta.
  EXPECT_NEAR(compute_chi0(a) * compute_pth(a) / (compute_chi0(b) * compute_pth(b)), 6.0, 1e-12);
}
