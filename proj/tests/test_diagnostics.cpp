#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "optohmf/config.hpp"
#include "optohmf/diagnostics.hpp"
#include "optohmf/error.hpp"
#include "optohmf/reduced.hpp"
#include "optohmf/simulation.hpp"

using namespace optohmf;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVec from_density(const Grid& g, auto&& density) {
  ComplexVec psi(g.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::sqrt(density(g.theta(i)));
  return psi;
}

MagnetizationTrace exponential_trace(double rate, double m0, double t_end, double dt, double cap) {
  MagnetizationTrace t;
  const auto n = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i <= n; ++i) {
    const double tau = i * dt;
    t.push(tau, std::min(cap, m0 * std::exp(rate * tau)), 0.0);
  }
  return t;
}

}  // namespace

TEST(Magnetization, Examples) {
  Grid g(128, 1);
  EXPECT_LT(magnetization(g, ComplexVec(128, 1.0)), 1e-15);
  for (double phi0 : {0.0, 0.4, 2.5, -1.2}) {
    const auto psi = from_density(g, [&](double t) { return 1.0 + 2.0 * 0.15 * std::cos(t + phi0); });
    EXPECT_NEAR(magnetization(g, psi), 0.15, 1e-15);
  }
  SpectralEngine e(g);
  ComplexVec two(128);
  for (std::size_t i = 0; i < 128; ++i) two[i] = 0.9 + 0.3 * std::cos(g.theta(i));
  normalize(two);
  EXPECT_NEAR(magnetization(g, two), reduced::project_wavefunction(e, two).state.S.real(), 1e-15);
}

TEST(Magnetization, ModeAmplitudes) {
  Grid g(128, 2);
  const ComplexVec flat(128, 1.0);
  EXPECT_NEAR(std::abs(mode_amplitude(g, flat, 0.0) - 1.0), 0.0, 1e-15);
  for (double k : {0.5, 1.0, 1.5, 2.0, -3.0}) EXPECT_LT(std::abs(mode_amplitude(g, flat, k)), 1e-15);
  const auto psi = from_density(g, [](double t) { return 1.0 + 0.4 * std::cos(t) + 0.1 * std::cos(2.0 * t); });
  EXPECT_NEAR(std::abs(mode_amplitude(g, psi, 1.0) - 0.2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mode_amplitude(g, psi, 2.0) - 0.05), 0.0, 1e-15);
  EXPECT_LT(std::abs(mode_amplitude(g, psi, 0.5)), 1e-15);
  EXPECT_THROW(mode_amplitude(g, psi, 0.3), GridError);
  EXPECT_THROW(mode_amplitude(g, ComplexVec(64, 1.0), 1.0), GridError);
}

TEST(MagnetizationProperty, PhaseAndTranslationInvariant) {
  Grid g(256, 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVec modes(256, 0.0);
    modes[0] = 1.0;
    for (int m = 1; m <= 5; ++m) {
      modes[static_cast<std::size_t>(m)] = 0.2 * Complex(gauss(rng), gauss(rng)) / double(m);
      modes[256 - static_cast<std::size_t>(m)] = 0.2 * Complex(gauss(rng), gauss(rng)) / double(m);
    }
    SpectralEngine e(g);
    ComplexVec psi = modes;
    e.inverse_in_place(psi);
    const double m_ref = magnetization(g, psi);

    ComplexVec rotated = psi;
    for (auto& v : rotated) v *= std::polar(1.0, 1.234);
    EXPECT_NEAR(magnetization(g, rotated), m_ref, 1e-12);

    // continuous shift by 0.77 through the mode phases
    ComplexVec shifted = modes;
    for (std::size_t j = 0; j < 256; ++j) shifted[j] *= std::polar(1.0, -g.kappa(j) * 0.77);
    e.inverse_in_place(shifted);
    EXPECT_NEAR(magnetization(g, shifted), m_ref, 1e-12);

    std::rotate(psi.begin(), psi.begin() + 37, psi.end());
    EXPECT_NEAR(magnetization(g, psi), m_ref, 1e-12);
  }
}

TEST(MagnetizationProperty, BoundedByHalfContrastOnSimulatedStates) {
  for (Model model : {Model::smf, Model::hmf}) {
    for (double ratio : {1.1, 10.0}) {
      SimulationSettings s;
      s.params = with_pump_ratio(PhysParams{100.0, 500.0, 1.0, 1.0, 1e-8}, ratio);
      s.n_points = 256;
      s.n_periods = 2;
      s.t_end = ratio > 2.0 ? 10.0 : 60.0;
      s.snapshot_stride = 250;
      const Trajectory t = evolve(model, s);
      const Grid g = s.grid();
      for (const auto& snap : t.snapshots) {
        double contrast = 0.0;
        for (auto v : snap.psi) contrast = std::max(contrast, std::abs(std::norm(v) - 1.0));
        const double m = magnetization(g, snap.psi);
        EXPECT_GE(m, 0.0);
        EXPECT_LE(m, 0.5 * contrast + 1e-12) << to_string(model) << " " << ratio << " tau " << snap.tau;
      }
    }
  }
}

TEST(Pulses, FindsOnePeakPerExcursion) {
  MagnetizationTrace t;
  for (int i = 0; i <= 3000; ++i) {
    const double tau = 0.01 * i;
    t.push(tau, std::abs(std::sin(tau)) * (1.0 + 0.01 * std::sin(7.0 * tau)) + 1e-3, 0.0);
  }
  const auto pulses = find_pulses(t);
  ASSERT_EQ(pulses.size(), 10u);
  for (std::size_t k = 0; k < pulses.size(); ++k) EXPECT_NEAR(pulses[k].tau, kPi * (k + 0.5), 0.05);
  EXPECT_TRUE(find_pulses(MagnetizationTrace{}).empty());
}

TEST(GrowthFit, RecoversExponentialRate) {
  const auto t = exponential_trace(0.7, 1e-4, 30.0, 0.01, 0.5);
  const GrowthFit fit = growth_rate_fit(t);
  EXPECT_NEAR(fit.rate, 0.7, 1e-10);
  EXPECT_LT(fit.residual, 1e-10);
  EXPECT_NEAR(fit.t_begin, std::log(3.0) / 0.7, 0.011);
  EXPECT_NEAR(fit.t_end, std::log(500.0) / 0.7, 0.011);

  const GrowthFit manual = growth_rate_fit(t, FitWindow{1.995, 4.005});
  EXPECT_NEAR(manual.rate, 0.7, 1e-10);
  EXPECT_EQ(manual.points, 201u);
}

TEST(GrowthFit, Errors) {
  MagnetizationTrace flat;
  for (int i = 0; i < 100; ++i) flat.push(i, 1e-3, 0.0);
  EXPECT_THROW(growth_rate_fit(flat), FitError);

  MagnetizationTrace wiggly = exponential_trace(1.0, 1e-3, 10.0, 0.1, 1.0);
  wiggly.m[30] *= 0.5;
  EXPECT_THROW(growth_rate_fit(wiggly, FitWindow{2.0, 4.0}), FitError);

  MagnetizationTrace zero = exponential_trace(1.0, 1e-3, 10.0, 0.1, 1.0);
  zero.m[25] = 0.0;
  EXPECT_THROW(growth_rate_fit(zero, FitWindow{2.0, 4.0}), FitError);
  EXPECT_THROW(growth_rate_fit(exponential_trace(1.0, 1e-3, 10.0, 0.1, 1.0), FitWindow{20.0, 30.0}), FitError);
  EXPECT_THROW(growth_rate_fit(MagnetizationTrace{}), FitError);
}

TEST(GrowthFit, HmfRatesFollowSquareRootLaw) {
  for (double beta : {1.1, 2.0}) {
    SimulationSettings s;
    s.params = with_pump_ratio(PhysParams{100.0, 500.0, 1.0, 1.0, 1e-8}, beta);
    s.n_points = 128;
    s.n_periods = 1;
    s.t_end = beta < 1.5 ? 40.0 : 12.0;
    s.initial.growing_mode = true;
    const GrowthFit fit = growth_rate_fit(evolve(Model::hmf, s).trace);
    EXPECT_NEAR(fit.rate, std::sqrt(beta - 1.0), 0.05 * std::sqrt(beta - 1.0)) << beta;
  }
}

TEST(Scattering, Values) {
  const double ten = 50.0 / 10.0 * 3.0, near = 50.0 / 1.1 * std::sqrt(0.1);
  EXPECT_NEAR(scattering_ratio(10.0, 100.0, 1.0).ratio, ten, 1e-12);
  EXPECT_NEAR(scattering_ratio(1.1, 100.0, 1.0).ratio, near, 1e-12);
  EXPECT_NEAR(scattering_ratio(2.0, 100.0, 1.0).ratio, 25.0, 1e-12);
  // The quoted 15.81 values are the strong and weak limiting forms, not the full ratio.
  EXPECT_NEAR(50.0 / std::sqrt(10.0), 15.81, 0.005);
  EXPECT_NEAR(50.0 * std::sqrt(0.1), 15.81, 0.005);
  const auto b = scattering_ratio(2.0, 100.0, 0.5);
  EXPECT_NEAR(b.growth_rate, 1.0, 1e-15);
  EXPECT_NEAR(b.scattering_rate, 1.5 * 2.0 / 50.0, 1e-15);
  EXPECT_NEAR(b.ratio, b.growth_rate / b.scattering_rate, 1e-13);
  EXPECT_NEAR(b.scattering_rate_over_gamma(1e-8), b.scattering_rate * 1e-8, 1e-24);
  EXPECT_THROW(scattering_ratio(1.0, 100.0, 1.0), DomainError);
  EXPECT_THROW(scattering_ratio(0.5, 100.0, 1.0), DomainError);
}

TEST(Scattering, UniqueMaximumAtBetaTwo) {
  double best = 0.0, best_beta = 0.0;
  double prev = 0.0;
  bool rising = true;
  int turns = 0;
  for (double beta = 1.0 + 1e-5; beta <= 20.0; beta += 1e-5) {
    const double r = scattering_ratio(beta, 100.0, 1.0).ratio;
    if (r > best) {
      best = r;
      best_beta = beta;
    }
    if (rising && r < prev) {
      rising = false;
      ++turns;
    } else if (!rising && r > prev) {
      rising = true;
      ++turns;
    }
    prev = r;
  }
  EXPECT_EQ(turns, 1);
  EXPECT_NEAR(best_beta, 2.0, 2e-5);
  EXPECT_NEAR(best, 25.0, 1e-8);
}
