#pragma once

#include <span>

#include "optohmf/params.hpp"
#include "optohmf/simulation.hpp"
#include "optohmf/spectral.hpp"

namespace optohmf::smf {

/// Forward field after the cloud: sqrt(p0) exp(-i chi0 n(theta)). The screen is
/// kept to all orders in chi0 n.
ComplexVec transmitted_field(std::span<const double> density, const PhysParams& params);

/// Backward field at the cloud: each mode of f_tr is multiplied by
/// sqrt(R) * diffraction_phase(kappa) and resynthesized.
ComplexVec backward_field(SpectralEngine& engine, std::span<const Complex> f_tr,
                          const PhysParams& params);

/// s = |f_tr|^2 + |b|^2 pointwise.
RealVec saturation(std::span<const Complex> f_tr, std::span<const Complex> b);

/// BEC + single-mirror-feedback model on a fixed grid. Holds preallocated
/// work buffers; one instance per thread.
class Solver {
 public:
  Solver(const PhysParams& params, const Grid& grid);

  const Grid& grid() const noexcept { return engine_.grid(); }
  const PhysParams& params() const noexcept { return params_; }

  /// One Strang step: half kinetic, full potential exp(-i V dtau) with
  /// V = Delta/(4 omega_r/Gamma) * s(theta) from the half-step density, half
  /// kinetic.
  void step(std::span<Complex> psi, double dtau);

  /// Recomputes the optical fields for psi into the internal buffers.
  void update_fields(std::span<const Complex> psi);

  const ComplexVec& transmitted() const noexcept { return f_tr_; }
  const ComplexVec& backward() const noexcept { return b_; }
  const RealVec& saturation_field() const noexcept { return s_; }

  /// Largest potential phase dtau * max|V| seen by step() so far.
  double max_potential_phase() const noexcept { return max_phase_; }

 private:
  PhysParams params_;
  SpectralEngine engine_;
  double chi0_;
  double sqrt_p0_;
  double v_scale_;
  ComplexVec mirror_;  ///< sqrt(R) * diffraction_phase per mode
  ComplexVec f_tr_;
  ComplexVec b_;
  RealVec s_;
  double max_phase_ = 0.0;
};

/// Effective non-local potential implied by s: ((1+R) p0 - s) / (4 R p0 chi0).
/// Coincides with the HMF Phi in the linear mapping regime.
RealVec effective_potential(std::span<const double> s, const PhysParams& params);

}  // namespace optohmf::smf
