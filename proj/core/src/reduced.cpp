#include "optohmf/reduced.hpp"

#include <cmath>
#include <sstream>

#include "optohmf/error.hpp"

namespace optohmf::reduced {

Derivative rhs(const State& state, double drive) noexcept {
  const Complex i{0.0, 1.0};
  const double sr = state.S.real();
  const double si = state.S.imag();
  Derivative d;
  d.dS = i * state.S + i * (0.5 * drive * state.D * 2.0 * sr);
  d.dD = -2.0 * drive * sr * si;
  return d;
}

double norm_invariant(const State& state) noexcept {
  return state.D * state.D + 2.0 * std::norm(state.S);
}

double drive_invariant(const State& state, double drive) noexcept {
  return state.D - drive * state.S.real() * state.S.real();
}

State homoclinic_state(double m0, double drive) {
  if (!(drive > 1.0)) throw DomainError("homoclinic orbit exists only above threshold (drive > 1)");
  const double s_i2 = m0 * m0 * (drive - 1.0) - 0.5 * drive * drive * m0 * m0 * m0 * m0;
  if (s_i2 < 0.0) throw DomainError("seed magnetization exceeds the pulse amplitude");
  State state;
  state.S = Complex(m0, -std::sqrt(s_i2));
  state.D = -1.0 + drive * m0 * m0;
  return state;
}

namespace {

State advance(const State& s, const Derivative& d, double h) {
  return State{s.S + h * d.dS, s.D + h * d.dD};
}

State rk4_step(const State& s, double drive, double h) {
  const Derivative k1 = rhs(s, drive);
  const Derivative k2 = rhs(advance(s, k1, 0.5 * h), drive);
  const Derivative k3 = rhs(advance(s, k2, 0.5 * h), drive);
  const Derivative k4 = rhs(advance(s, k3, h), drive);
  return State{s.S + (h / 6.0) * (k1.dS + 2.0 * k2.dS + 2.0 * k3.dS + k4.dS),
               s.D + (h / 6.0) * (k1.dD + 2.0 * k2.dD + 2.0 * k3.dD + k4.dD)};
}

}  // namespace

Trajectory integrate(const State& start, double drive, double dtau, std::size_t n_steps) {
  Trajectory traj;
  traj.step_size_warning = std::abs(dtau) * std::abs(drive) >= 0.1;
  traj.samples.reserve(n_steps + 1);
  const double c1 = norm_invariant(start);
  const double c2 = drive_invariant(start, drive);
  State state = start;
  traj.samples.push_back({0.0, state});
  for (std::size_t k = 1; k <= n_steps; ++k) {
    state = rk4_step(state, drive, dtau);
    traj.samples.push_back({static_cast<double>(k) * dtau, state});
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(norm_invariant(state) - c1));
    traj.max_drive_drift =
        std::max(traj.max_drive_drift, std::abs(drive_invariant(state, drive) - c2));
  }
  return traj;
}

double SechPulse::operator()(double tau) const noexcept {
  return amplitude / std::cosh(rate * (tau - t0));
}

SechPulse make_pulse(double drive, double m0) {
  if (!(drive > 1.0)) {
    std::ostringstream os;
    os << "sech pulse needs drive > 1 (got " << drive << ")";
    throw DomainError(os.str());
  }
  SechPulse pulse;
  pulse.drive = drive;
  pulse.rate = std::sqrt(drive - 1.0);
  pulse.amplitude = std::sqrt(2.0) / drive * pulse.rate;
  if (!(m0 > 0.0) || !(m0 < pulse.amplitude)) {
    std::ostringstream os;
    os << "initial magnetization " << m0 << " outside (0, " << pulse.amplitude
       << "): arccosh argument below 1";
    throw DomainError(os.str());
  }
  pulse.m0 = m0;
  pulse.t0 = std::acosh(pulse.amplitude / m0) / pulse.rate;
  return pulse;
}

double analytic_M(double tau, double drive, double m0) { return make_pulse(drive, m0)(tau); }

Projection project_wavefunction(SpectralEngine& engine, std::span<const Complex> psi) {
  const Grid& grid = engine.grid();
  ComplexVec modes(psi.begin(), psi.end());
  engine.forward_in_place(modes);
  const Complex plus = modes[grid.index_of(1.0)];
  const Complex minus = modes[grid.index_of(-1.0)];

  Projection p;
  p.c0 = modes[0];
  p.c1 = plus + minus;
  p.state.S = p.c0 * std::conj(p.c1);
  p.state.D = 0.5 * std::norm(p.c1) - std::norm(p.c0);
  p.sine_weight = 0.5 * std::norm(plus - minus);

  double total = 0.0;
  for (const auto& c : modes) total += std::norm(c);
  p.residual_weight = total - std::norm(p.c0) - std::norm(plus) - std::norm(minus);
  if (p.residual_weight < 0.0) p.residual_weight = 0.0;
  return p;
}

}  // namespace optohmf::reduced
