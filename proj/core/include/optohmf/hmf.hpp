#pragma once

#include <span>

#include "optohmf/simulation.hpp"
#include "optohmf/spectral.hpp"

namespace optohmf::hmf {

/// Phi(theta) = Re(n1 exp(i theta)) with n1 the kappa = 1 density coefficient.
/// Higher density harmonics are annihilated by the cosine kernel.
RealVec nonlocal_potential(const Grid& grid, std::span<const Complex> psi);

/// Energy (1/L) integral psi* [-d^2/dtheta^2 - (drive/2) Phi] psi, i.e. the
/// kinetic energy minus (drive/2) M^2, in units of hbar*omega_r.
double energy(SpectralEngine& engine, std::span<const Complex> psi, double drive);

/// Quantum HMF effective GPE: i dpsi/dtau = -psi'' - drive * Phi * psi.
class Solver {
 public:
  Solver(double drive, const Grid& grid);

  const Grid& grid() const noexcept { return engine_.grid(); }
  double drive() const noexcept { return drive_; }

  /// Strang step with potential phase exp(+i drive Phi dtau).
  void step(std::span<Complex> psi, double dtau);

  double energy(std::span<const Complex> psi);

 private:
  double drive_;
  SpectralEngine engine_;
  ComplexVec carrier_;  ///< exp(-i theta_j)
  ComplexVec work_;
};

}  // namespace optohmf::hmf
