#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "optohmf/diagnostics.hpp"
#include "optohmf/error.hpp"
#include "optohmf/simulation.hpp"
#include "optohmf/smf.hpp"

using namespace optohmf;

namespace {

constexpr double kPi = std::numbers::pi;

PhysParams unit_pump(double chi0, double R = 1.0) {
  // b0 / (2 Delta) = chi0 with Delta = 500; p0 = 1 isolates the phase screen
  return {1000.0 * chi0, 500.0, 1.0, R, 1e-8};
}

RealVec cosine_density(const Grid& g, double a) {
  RealVec n(g.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = 1.0 + a * std::cos(g.theta(i));
  return n;
}

ComplexVec smooth_random_state(const Grid& g, std::uint64_t seed, int max_mode = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ComplexVec psi(g.size(), 1.0);
  for (int m = 1; m <= max_mode; ++m) {
    const Complex a(gauss(rng), gauss(rng)), b(gauss(rng), gauss(rng));
    for (std::size_t i = 0; i < psi.size(); ++i)
      psi[i] += 0.1 / m * (a * std::polar(1.0, m * g.theta(i)) + b * std::polar(1.0, -m * g.theta(i)));
  }
  normalize(psi);
  return psi;
}

Complex coefficient(const Grid& g, std::span<const Complex> f, double kappa) {
  SpectralEngine e(g);
  ComplexVec m(f.begin(), f.end());
  e.forward_in_place(m);
  return m[g.index_of(kappa)];
}

Complex coefficient(const Grid& g, std::span<const double> f, double kappa) {
  ComplexVec c(f.begin(), f.end());
  return coefficient(g, c, kappa);
}

double max_diff(const ComplexVec& a, const ComplexVec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(SmfFields, TransmittedHomogeneous) {
  Grid g(64, 1);
  PhysParams p = unit_pump(0.1);
  p.p0 = 4.0;
  const auto f = smf::transmitted_field(RealVec(64, 1.0), p);
  for (auto v : f) EXPECT_LT(std::abs(v - 2.0 * std::polar(1.0, -0.1)), 1e-15);
}

TEST(SmfFields, TransmittedWeakCouplingIsFlat) {
  Grid g(64, 1);
  PhysParams p = unit_pump(1e-12);
  const auto f = smf::transmitted_field(cosine_density(g, 0.5), p);
  for (auto v : f) EXPECT_LT(std::abs(v - 1.0), 1e-11);
}

TEST(SmfFields, TransmittedModeMatchesBessel) {
  Grid g(128, 1);
  const auto f = smf::transmitted_field(cosine_density(g, 0.2), unit_pump(0.1));
  // exp(-i z cos) = sum (-i)^m J_m(z) e^{i m theta}, z = 0.02
  const Complex expected = std::polar(1.0, -0.1) * Complex(0.0, -1.0) * std::cyl_bessel_j(1.0, 0.02);
  EXPECT_LT(std::abs(coefficient(g, f, 1.0) - expected), 1e-15);
  EXPECT_LT(std::abs(coefficient(g, f, -1.0) - expected), 1e-15);
  // first order: -0.01 i e^{-0.1 i}
  const Complex linear = Complex(0.0, -0.01) * std::polar(1.0, -0.1);
  EXPECT_LT(std::abs(coefficient(g, f, 1.0) - linear) / 0.01, 1e-4);
  for (auto v : f) EXPECT_NEAR(std::norm(v), 1.0, 1e-15);
}

TEST(SmfFields, BackwardUniform) {
  Grid g(64, 1);
  SpectralEngine e(g);
  PhysParams p = unit_pump(0.1);
  p.p0 = 2.0;
  const ComplexVec f(64, std::sqrt(2.0));
  const auto b = smf::backward_field(e, f, p);
  for (auto v : b) EXPECT_LT(std::abs(v - std::sqrt(2.0)), 1e-14);
}

TEST(SmfFields, BackwardFirstHarmonicPhase) {
  Grid g(64, 2);
  SpectralEngine e(g);
  const PhysParams p = unit_pump(0.1, 0.64);
  ComplexVec f(64);
  for (std::size_t i = 0; i < 64; ++i) f[i] = Complex(0.3, 0.1) * std::cos(g.theta(i));
  const auto b = smf::backward_field(e, f, p);
  for (std::size_t i = 0; i < 64; ++i)
    EXPECT_LT(std::abs(b[i] - Complex(0.0, -0.8) * f[i]), 1e-14);
}

TEST(SmfFields, BackwardAppliesKernelPerMode) {
  Grid g(64, 2);
  SpectralEngine e(g);
  const PhysParams p = unit_pump(0.1, 0.5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  ComplexVec f(64);
  for (auto& v : f) v = {gauss(rng), gauss(rng)};
  const auto b = smf::backward_field(e, f, p);
  for (std::size_t j = 0; j < 64; ++j) {
    const double k = g.kappa(j);
    const Complex want = coefficient(g, f, k) * std::sqrt(0.5) * std::polar(1.0, -0.5 * kPi * k * k);
    EXPECT_LT(std::abs(coefficient(g, b, k) - want), 1e-14);
  }
}

TEST(SmfFields, SaturationExamples) {
  Grid g(64, 1);
  SpectralEngine e(g);
  PhysParams p = unit_pump(0.1);
  p.p0 = 3.0;
  const auto f = smf::transmitted_field(RealVec(64, 1.0), p);
  const auto s = smf::saturation(f, smf::backward_field(e, f, p));
  for (double v : s) EXPECT_NEAR(v, 6.0, 1e-13);

  p.R = 1e-30;
  const auto s0 = smf::saturation(f, smf::backward_field(e, f, p));
  for (double v : s0) EXPECT_NEAR(v, 3.0, 1e-13);
  EXPECT_THROW(smf::saturation(f, ComplexVec(32)), GridError);
}

TEST(SmfFields, LinearizedIntensityModulation) {
  Grid g(128, 1);
  SpectralEngine e(g);
  for (double R : {1.0, 0.7}) {
    const PhysParams p = unit_pump(0.01, R);
    const double a = 0.1;  // |n1| = a / 2
    const auto f = smf::transmitted_field(cosine_density(g, a), p);
    const auto b = smf::backward_field(e, f, p);
    RealVec b2(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) b2[i] = std::norm(b[i]);
    // -4 R p0 chi0 |n1| cos(theta) has coefficient -2 R p0 chi0 |n1| at kappa = 1
    const double want = -2.0 * R * p.p0 * 0.01 * (a / 2.0);
    const Complex got = coefficient(g, b2, 1.0);
    EXPECT_NEAR(got.real() / want, 1.0, 0.02) << R;
    EXPECT_LT(std::abs(got.imag()), 1e-14);

    const auto s = smf::saturation(f, b);
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    EXPECT_NEAR(mean, (1.0 + R) * p.p0, 1e-3 * p.p0);
  }
}

TEST(SmfFields, EffectivePotentialInvertsLinearIntensity) {
  Grid g(64, 1);
  const PhysParams p = unit_pump(0.02);
  RealVec s(64);
  for (std::size_t i = 0; i < 64; ++i)
    s[i] = 2.0 * p.p0 - 4.0 * p.p0 * 0.02 * 0.3 * std::cos(g.theta(i));
  const auto phi = smf::effective_potential(s, p);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(phi[i], 0.3 * std::cos(g.theta(i)), 1e-12);
}

TEST(SmfSolver, HomogeneousStateOnlyGainsGlobalPhase) {
  Grid g(128, 2);
  const PhysParams p{100.0, 500.0, 2e-9, 1.0, 1e-8};
  smf::Solver solver(p, g);
  ComplexVec psi(128, 1.0);
  for (int k = 0; k < 50; ++k) solver.step(psi, 1e-3);
  for (auto v : psi) {
    EXPECT_LT(std::abs(v - psi[0]), 1e-12);
    EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
  }
}

TEST(SmfSolver, PlaneWaveFollowsFreeDispersion) {
  // Uniform density, so the potential is the constant V0 = scale * (1 + R) p0.
  Grid g(128, 4);
  const PhysParams p{100.0, 500.0, 2.2e-10, 0.8, 1e-8};
  smf::Solver solver(p, g);
  const double kappa = 1.25;
  ComplexVec psi(128);
  for (std::size_t i = 0; i < 128; ++i) psi[i] = std::polar(1.0, kappa * g.theta(i));
  const double v0 = potential_scale(p) * (1.0 + p.R) * p.p0;
  const double dtau = 1e-3;
  const int steps = 2000;
  for (int k = 0; k < steps; ++k) solver.step(psi, dtau);
  const double tau = steps * dtau;
  for (std::size_t i = 0; i < 128; ++i)
    EXPECT_LT(std::abs(psi[i] - std::polar(1.0, kappa * g.theta(i) - (kappa * kappa + v0) * tau)), 1e-10);
}

TEST(SmfSolver, SecondOrderInTime) {
  Grid g(128, 1);
  const PhysParams p{100.0, 500.0, 2e-9, 1.0, 1e-8};
  const ComplexVec start = smooth_random_state(g, 21);
  auto run = [&](double dtau, int steps) {
    smf::Solver solver(p, g);
    ComplexVec psi = start;
    for (int k = 0; k < steps; ++k) solver.step(psi, dtau);
    return psi;
  };
  const double T = 0.02;
  const auto coarse = run(T / 10, 10), mid = run(T / 20, 20), fine = run(T / 40, 40);
  const double e1 = max_diff(coarse, mid), e2 = max_diff(mid, fine);
  const double order = std::log2(e1 / e2);
  EXPECT_NEAR(order, 2.0, 0.1) << e1 << " " << e2;
}

TEST(SmfSolver, PhaseScreenMirrorBoundAndNorm) {
  Grid g(256, 2);
  const PhysParams p{100.0, 500.0, 2e-9, 0.9, 1e-8};
  smf::Solver solver(p, g);
  ComplexVec psi = smooth_random_state(g, 4, 6);
  for (int k = 0; k < 3000; ++k) {
    solver.step(psi, 1e-3);
    if (k % 50 != 0) continue;
    double mirror = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      EXPECT_LT(std::abs(std::norm(solver.transmitted()[i]) - p.p0) / p.p0, 1e-12);
      mirror += std::norm(solver.backward()[i]);
      EXPECT_NEAR(solver.saturation_field()[i], p.p0 + std::norm(solver.backward()[i]), 1e-12 * p.p0);
    }
    EXPECT_LE(mirror / static_cast<double>(psi.size()), p.R * p.p0 * (1.0 + 1e-12));
  }
  EXPECT_NEAR(mean_square(psi), 1.0, 1e-9);
}

TEST(SmfSolver, NormConservedOverLongRun) {
  Grid g(64, 1);
  const PhysParams p{100.0, 500.0, 2.2e-10, 1.0, 1e-8};
  smf::Solver solver(p, g);
  ComplexVec psi = smooth_random_state(g, 8, 3);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    solver.step(psi, 1e-3);
    if (k % 1000 == 0) worst = std::max(worst, std::abs(mean_square(psi) - 1.0));
  }
  worst = std::max(worst, std::abs(mean_square(psi) - 1.0));
  EXPECT_LT(worst, 1e-9);
}

TEST(SmfSolver, DensityStaysNonNegativeAndPhaseTracked) {
  Grid g(64, 1);
  const PhysParams p{100.0, 500.0, 2e-9, 1.0, 1e-8};
  smf::Solver solver(p, g);
  ComplexVec psi = smooth_random_state(g, 2);
  for (int k = 0; k < 100; ++k) solver.step(psi, 1e-3);
  EXPECT_GT(solver.max_potential_phase(), 0.0);
  EXPECT_THROW(solver.update_fields(ComplexVec(32)), GridError);
}

TEST(SmfEvolve, BelowThresholdStaysNearSeed) {
  SimulationSettings s;
  s.params = PhysParams{100.0, 500.0, 0.9 * 2e-10, 1.0, 1e-8};
  s.n_points = 128;
  s.n_periods = 1;
  s.t_end = 50.0;
  const Trajectory t = evolve(Model::smf, s);
  const double m0 = t.trace.m.front();
  for (double m : t.trace.m) EXPECT_LE(m, 2.0 * m0);
  EXPECT_LT(t.max_norm_error, 1e-9);
}

TEST(SmfEvolve, NonFiniteStateAborts) {
  // Delta / (4 omega_r) overflows, so the first potential phase is NaN.
  SimulationSettings s;
  s.params = PhysParams{100.0, 1e6, 2e-10, 1.0, 1e-320};
  s.n_points = 64;
  s.n_periods = 1;
  s.t_end = 1.0;
  s.trace_stride = 1;
  try {
    evolve(Model::smf, s);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("non-finite state at step 1"), std::string::npos) << what;
    EXPECT_NE(what.find("last finite M"), std::string::npos) << what;
  }
}
