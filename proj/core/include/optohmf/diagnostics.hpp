#pragma once

#include <span>
#include <vector>

#include "optohmf/spectral.hpp"

namespace optohmf {

/// Time series of the order parameter M and the second density harmonic.
struct MagnetizationTrace {
  RealVec times;  ///< tau, units of 1/omega_r
  RealVec m;      ///< M(tau)
  RealVec mode2;  ///< |n^(kappa=2)|(tau)

  std::size_t size() const noexcept { return times.size(); }
  void push(double tau, double m_value, double mode2_value) {
    times.push_back(tau);
    m.push_back(m_value);
    mode2.push_back(mode2_value);
  }
};

/// Density Fourier coefficient (1/L) * integral |psi|^2 exp(-i kappa theta).
/// Throws GridError when kappa is not resolvable on the grid.
Complex mode_amplitude(const Grid& grid, std::span<const Complex> psi, double kappa);

/// Same as mode_amplitude for an already computed real density.
Complex density_mode(const Grid& grid, std::span<const double> density, double kappa);

/// |mode_amplitude(psi, 1)|: the order parameter. Uses the kappa = 1 global
/// mode, so on multi-period grids it measures the Lambda_c-periodic pattern.
double magnetization(const Grid& grid, std::span<const Complex> psi);

struct Pulse {
  std::size_t index = 0;  ///< trace sample of the peak
  double tau = 0.0;
  double value = 0.0;
};

/// Maxima of M, one per excursion above `fraction` of the global maximum.
std::vector<Pulse> find_pulses(const MagnetizationTrace& trace, double fraction = 0.5);

struct GrowthFit {
  double rate = 0.0;      ///< G / omega_r
  double residual = 0.0;  ///< RMS residual of log M about the line
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
};

struct FitWindow {
  double t_begin;
  double t_end;
};

/// Least-squares slope of log M over a window inside the linear regime.
/// Auto-selected window: from the first time M exceeds 3x its initial value
/// to the first time it exceeds 0.1x the trace maximum.
/// Throws FitError when the window is empty, non-positive or non-monotone.
GrowthFit growth_rate_fit(const MagnetizationTrace& trace);
GrowthFit growth_rate_fit(const MagnetizationTrace& trace, FitWindow window);

/// Incoherent scattering budget. Both rates are expressed in units of
/// omega_r so the ratio carries no dependence on p_th.
struct ScatteringBudget {
  double beta = 0.0;              ///< p0 / p_th
  double growth_rate = 0.0;       ///< G / omega_r = sqrt(beta - 1)
  double scattering_rate = 0.0;   ///< r_s / omega_r = (1+R) beta / (b0 R)
  double ratio = 0.0;             ///< G / r_s

  /// r_s / Gamma, given omega_r / Gamma.
  double scattering_rate_over_gamma(double omega_r_hat) const noexcept {
    return scattering_rate * omega_r_hat;
  }
};

/// Throws DomainError for beta <= 1.
ScatteringBudget scattering_ratio(double beta, double b0, double R);

}  // namespace optohmf
