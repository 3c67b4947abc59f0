#pragma once

#include <string>
#include <vector>

namespace optohmf {

/// Dimensionless physical inputs. Rates are ratios to Gamma.
struct PhysParams {
  double b0 = 100.0;          ///< optical thickness at resonance
  double delta_hat = 500.0;   ///< detuning 2*delta/Gamma
  double p0 = 2.2e-10;        ///< scaled pump saturation parameter
  double R = 1.0;             ///< mirror reflectivity
  double omega_r_hat = 1e-8;  ///< recoil frequency over Gamma
};

struct DerivedParams {
  double chi0 = 0.0;
  double p_th = 0.0;
  double epsilon_over_omega_r = 0.0;  ///< drive strength, equals p0/p_th
};

// Internal time is tau = omega_r * t. Every dtau, t_end and timestamp in the
// library is in units of 1/omega_r.

/// Throws ParameterError on hard violations and returns soft-regime warnings
/// (small detuning, chi0 outside the linear mapping regime).
std::vector<std::string> validate(const PhysParams& params);

/// b0 / (2 Delta). Throws ParameterError for zero detuning or b0 <= 0.
double compute_chi0(const PhysParams& params);

/// Pump threshold 2 (omega_r/Gamma) / (b0 R).
double compute_pth(const PhysParams& params);

DerivedParams compute_drive(const PhysParams& params);

/// Potential prefactor Delta / (4 omega_r/Gamma): converts the saturation
/// parameter into a dipole potential in units of hbar*omega_r.
double potential_scale(const PhysParams& params);

/// Copy of `base` with p0 set to ratio * p_th.
PhysParams with_pump_ratio(PhysParams base, double ratio);

}  // namespace optohmf
