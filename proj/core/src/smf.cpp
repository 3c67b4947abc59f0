#include "optohmf/smf.hpp"

#include <algorithm>
#include <cmath>

#include "optohmf/error.hpp"

namespace optohmf::smf {

ComplexVec transmitted_field(std::span<const double> density, const PhysParams& params) {
  const double chi0 = compute_chi0(params);
  const double amp = std::sqrt(params.p0);
  ComplexVec out(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) out[i] = std::polar(amp, -chi0 * density[i]);
  return out;
}

ComplexVec backward_field(SpectralEngine& engine, std::span<const Complex> f_tr,
                          const PhysParams& params) {
  if (f_tr.size() != engine.grid().size()) throw GridError("field does not match grid");
  ComplexVec b(f_tr.begin(), f_tr.end());
  engine.forward_in_place(b);
  const double sqrt_r = std::sqrt(params.R);
  engine.apply_mode_factor(b, [sqrt_r](double kappa) { return sqrt_r * diffraction_phase(kappa); });
  engine.inverse_in_place(b);
  return b;
}

RealVec saturation(std::span<const Complex> f_tr, std::span<const Complex> b) {
  if (f_tr.size() != b.size()) throw GridError("forward and backward fields differ in size");
  RealVec s(f_tr.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::norm(f_tr[i]) + std::norm(b[i]);
  return s;
}

RealVec effective_potential(std::span<const double> s, const PhysParams& params) {
  const double chi0 = compute_chi0(params);
  const double denom = 4.0 * params.R * params.p0 * chi0;
  RealVec phi(s.size(), 0.0);
  if (denom == 0.0) return phi;
  const double offset = (1.0 + params.R) * params.p0;
  for (std::size_t i = 0; i < s.size(); ++i) phi[i] = (offset - s[i]) / denom;
  return phi;
}

Solver::Solver(const PhysParams& params, const Grid& grid)
    : params_(params),
      engine_(grid),
      chi0_(compute_chi0(params)),
      sqrt_p0_(std::sqrt(params.p0)),
      v_scale_(potential_scale(params)),
      mirror_(grid.size()),
      f_tr_(grid.size()),
      b_(grid.size()),
      s_(grid.size()) {
  const double sqrt_r = std::sqrt(params.R);
  for (std::size_t j = 0; j < grid.size(); ++j)
    mirror_[j] = sqrt_r * diffraction_phase(grid.kappa(j));
}

void Solver::update_fields(std::span<const Complex> psi) {
  const std::size_t n = psi.size();
  if (n != f_tr_.size()) throw GridError("wavefunction does not match grid");
  for (std::size_t i = 0; i < n; ++i) f_tr_[i] = std::polar(sqrt_p0_, -chi0_ * std::norm(psi[i]));
  std::copy(f_tr_.begin(), f_tr_.end(), b_.begin());
  engine_.forward_in_place(b_);
  for (std::size_t j = 0; j < n; ++j) b_[j] *= mirror_[j];
  engine_.inverse_in_place(b_);
  for (std::size_t i = 0; i < n; ++i) s_[i] = std::norm(f_tr_[i]) + std::norm(b_[i]);
}

void Solver::step(std::span<Complex> psi, double dtau) {
  engine_.forward_in_place(psi);
  engine_.apply_kinetic(psi, 0.5 * dtau);
  engine_.inverse_in_place(psi);

  update_fields(psi);
  double v_max = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double v = v_scale_ * s_[i];
    v_max = std::max(v_max, std::abs(v));
    psi[i] *= std::polar(1.0, -v * dtau);
  }
  max_phase_ = std::max(max_phase_, v_max * dtau);

  engine_.forward_in_place(psi);
  engine_.apply_kinetic(psi, 0.5 * dtau);
  engine_.inverse_in_place(psi);
}

}  // namespace optohmf::smf
