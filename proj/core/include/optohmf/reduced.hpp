#pragma once

#include <complex>
#include <span>
#include <vector>

#include "optohmf/spectral.hpp"

namespace optohmf::reduced {

/// Two-state (momenta 0, +-q_c) model psi = c0 + c1 cos(theta), written in
/// S = c0 c1* and D = |c1|^2/2 - |c0|^2.
struct State {
  Complex S{0.0, 0.0};
  double D = -1.0;
};

struct Derivative {
  Complex dS{0.0, 0.0};
  double dD = 0.0;
};

/// dS/dtau = i S + i (drive/2) D (S + S*),  dD/dtau = -2 drive S_R S_I.
Derivative rhs(const State& state, double drive) noexcept;

/// D^2 + 2|S|^2 (1 for a normalized state).
double norm_invariant(const State& state) noexcept;
/// D - drive * S_R^2 (-1 on orbits leaving the homogeneous state).
double drive_invariant(const State& state, double drive) noexcept;

/// State on the orbit through the homogeneous fixed point with S_R = m0:
/// D = -1 + drive m0^2 and S_I < 0 chosen so both invariants take their
/// homogeneous-start values (1 and -1). Requires drive > 1.
State homoclinic_state(double m0, double drive);

struct Sample {
  double tau = 0.0;
  State state;
};

struct Trajectory {
  std::vector<Sample> samples;
  double max_norm_drift = 0.0;
  double max_drive_drift = 0.0;
  bool step_size_warning = false;
};

/// Fixed-step classical RK4. Emits n_steps + 1 samples. A negative dtau
/// integrates backwards. Sets step_size_warning when |dtau| * drive >= 0.1.
Trajectory integrate(const State& start, double drive, double dtau, std::size_t n_steps);

/// Closed-form sech magnetization pulse.
struct SechPulse {
  double drive = 0.0;
  double amplitude = 0.0;  ///< sqrt(2)/drive * sqrt(drive - 1)
  double rate = 0.0;       ///< sqrt(drive - 1)
  double t0 = 0.0;         ///< peak time
  double m0 = 0.0;

  double operator()(double tau) const noexcept;
};

/// Throws DomainError if drive <= 1 or m0 is outside (0, amplitude).
SechPulse make_pulse(double drive, double m0);

double analytic_M(double tau, double drive, double m0);

/// Projection of psi onto the two-state basis.
struct Projection {
  State state;
  Complex c0;
  Complex c1;
  double residual_weight = 0.0;  ///< weight in |kappa| >= 2
  double sine_weight = 0.0;      ///< weight in the sin(theta) component
};

/// Uses the kappa = 0, +-1 coefficients; c1 = psi_(+1) + psi_(-1).
Projection project_wavefunction(SpectralEngine& engine, std::span<const Complex> psi);

}  // namespace optohmf::reduced
