#include "optohmf/hmf.hpp"

#include <algorithm>
#include <cmath>

#include "optohmf/diagnostics.hpp"
#include "optohmf/error.hpp"

namespace optohmf::hmf {

RealVec nonlocal_potential(const Grid& grid, std::span<const Complex> psi) {
  const Complex n1 = mode_amplitude(grid, psi, 1.0);
  RealVec phi(grid.size());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = std::real(n1 * std::polar(1.0, grid.theta(i)));
  return phi;
}

double energy(SpectralEngine& engine, std::span<const Complex> psi, double drive) {
  const Grid& grid = engine.grid();
  ComplexVec modes(psi.begin(), psi.end());
  engine.forward_in_place(modes);
  double kinetic = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double k = grid.kappa(j);
    kinetic += k * k * std::norm(modes[j]);
  }
  const double m = magnetization(grid, psi);
  return kinetic - 0.5 * drive * m * m;
}

Solver::Solver(double drive, const Grid& grid)
    : drive_(drive), engine_(grid), carrier_(grid.size()), work_(grid.size()) {
  if (!(drive > 0.0)) throw ParameterError("HMF drive must be positive (ferromagnetic case)");
  for (std::size_t i = 0; i < grid.size(); ++i) carrier_[i] = std::polar(1.0, -grid.theta(i));
}

void Solver::step(std::span<Complex> psi, double dtau) {
  if (psi.size() != carrier_.size()) throw GridError("wavefunction does not match grid");
  engine_.forward_in_place(psi);
  engine_.apply_kinetic(psi, 0.5 * dtau);
  engine_.inverse_in_place(psi);

  Complex n1{0.0, 0.0};
  for (std::size_t i = 0; i < psi.size(); ++i) n1 += std::norm(psi[i]) * carrier_[i];
  n1 /= static_cast<double>(psi.size());
  const double kick = drive_ * dtau;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    // Phi_i = Re(n1 e^{i theta_i}) = Re(n1 conj(carrier_i))
    const double phi = std::real(n1 * std::conj(carrier_[i]));
    psi[i] *= std::polar(1.0, kick * phi);
  }

  engine_.forward_in_place(psi);
  engine_.apply_kinetic(psi, 0.5 * dtau);
  engine_.inverse_in_place(psi);
}

double Solver::energy(std::span<const Complex> psi) {
  return hmf::energy(engine_, psi, drive_);
}

}  // namespace optohmf::hmf
