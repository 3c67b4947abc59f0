#include "optohmf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "optohmf/error.hpp"
#include "optohmf/hmf.hpp"
#include "optohmf/io.hpp"
#include "optohmf/smf.hpp"

namespace optohmf {

std::size_t SimulationSettings::steps() const {
  if (!(dtau > 0.0)) throw ConfigError("dtau must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  return static_cast<std::size_t>(std::llround(t_end / dtau));
}

void normalize(std::span<Complex> psi) {
  const double ms = mean_square(psi);
  if (!(ms > 0.0) || !std::isfinite(ms)) throw NumericalError("cannot normalize a null wavefunction");
  const double scale = 1.0 / std::sqrt(ms);
  for (auto& v : psi) v *= scale;
}

namespace {

ComplexVec cosine_state(const Grid& grid, const InitialCondition& ic, double drive,
                        std::uint64_t seed) {
  Complex c1 = ic.amplitude;
  if (ic.growing_mode && drive > 1.0) c1 *= Complex(1.0, std::sqrt(drive - 1.0));
  ComplexVec psi(grid.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = 1.0 + c1 * std::cos(grid.theta(i));

  if (ic.noise_rms > 0.0) {
    // Random complex amplitudes on the lowest modes (|kappa| <= 4, kappa != 0),
    // rescaled so the perturbation has the requested RMS.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int max_index = std::min<int>(4 * grid.periods(), static_cast<int>(grid.size() / 2) - 1);
    ComplexVec noise(grid.size(), Complex{0.0, 0.0});
    for (int m = -max_index; m <= max_index; ++m) {
      if (m == 0) continue;
      const Complex a(normal(rng), normal(rng));
      const double k = static_cast<double>(m) / grid.periods();
      for (std::size_t i = 0; i < psi.size(); ++i) noise[i] += a * std::polar(1.0, k * grid.theta(i));
    }
    const double rms = std::sqrt(mean_square(noise));
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += noise[i] * (ic.noise_rms / rms);
  }
  return psi;
}

ComplexVec gaussian_state(const Grid& grid, const InitialCondition& ic) {
  if (!(ic.width > 0.0)) throw ConfigError("gaussian width must be positive");
  const double sigma = ic.width * 2.0 * std::numbers::pi;
  const double length = grid.length();
  const double centre = ic.center * length;
  ComplexVec psi(grid.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double d = grid.theta(i) - centre;
    d -= length * std::round(d / length);
    psi[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return psi;
}

ComplexVec file_state(const Grid& grid, const InitialCondition& ic) {
  const io::SnapshotFile file = io::read_snapshot(ic.path);
  if (file.header.field != "psi") throw ConfigError("initial snapshot does not hold a wavefunction");
  if (file.header.n_points != grid.size() || file.header.n_periods != grid.periods())
    throw GridError("initial snapshot grid differs from the configured grid");
  return file.values;
}

}  // namespace

ComplexVec make_initial_state(const Grid& grid, const InitialCondition& initial, double drive,
                              std::uint64_t seed) {
  ComplexVec psi;
  switch (initial.kind) {
    case InitialKind::cosine: psi = cosine_state(grid, initial, drive, seed); break;
    case InitialKind::gaussian: psi = gaussian_state(grid, initial); break;
    case InitialKind::file: psi = file_state(grid, initial); break;
  }
  normalize(psi);
  return psi;
}

namespace {

struct SmfAdapter {
  smf::Solver solver;
  PhysParams params;

  void step(std::span<Complex> psi, double dtau) { solver.step(psi, dtau); }

  RealVec intensity(std::span<const Complex> psi) {
    solver.update_fields(psi);
    return solver.saturation_field();
  }

  RealVec potential(std::span<const double> s) const { return smf::effective_potential(s, params); }

  double energy(std::span<const Complex>) { return std::nan(""); }

  double max_phase(double) const { return solver.max_potential_phase(); }
};

struct HmfAdapter {
  hmf::Solver solver;
  PhysParams params;
  double max_phi = 0.0;

  void step(std::span<Complex> psi, double dtau) { solver.step(psi, dtau); }

  // Saturation parameter the HMF potential stands for in the linear mapping.
  RealVec intensity(std::span<const Complex> psi) {
    const RealVec phi = hmf::nonlocal_potential(solver.grid(), psi);
    const double chi0 = compute_chi0(params);
    RealVec s(phi.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = (1.0 + params.R) * params.p0 - 4.0 * params.R * params.p0 * chi0 * phi[i];
      max_phi = std::max(max_phi, std::abs(phi[i]));
    }
    return s;
  }

  RealVec potential(std::span<const double> s) const { return smf::effective_potential(s, params); }

  double energy(std::span<const Complex> psi) { return solver.energy(psi); }

  double max_phase(double dtau) const { return solver.drive() * max_phi * dtau; }
};

template <typename Adapter>
Trajectory run(Adapter& model, const SimulationSettings& settings, bool has_energy,
               const char* model_name, const SnapshotObserver& observer) {
  const Grid grid = settings.grid();
  const double drive = compute_drive(settings.params).epsilon_over_omega_r;
  ComplexVec psi = make_initial_state(grid, settings.initial, drive, settings.seed);
  const std::size_t n_steps = settings.steps();
  const std::size_t trace_stride = std::max<std::size_t>(1, settings.trace_stride);

  Trajectory traj;
  traj.warnings = validate(settings.params);

  // NaN guard plus one trace sample; returns the intensity for snapshots.
  auto sample = [&](std::size_t step, bool keep_trace) {
    const double tau = static_cast<double>(step) * settings.dtau;
    RealVec density(psi.size());
    std::transform(psi.begin(), psi.end(), density.begin(), [](Complex v) { return std::norm(v); });
    double mean = 0.0;
    for (double n : density) mean += n;
    mean /= static_cast<double>(density.size());
    const Complex n1 = density_mode(grid, density, 1.0);
    if (!std::isfinite(std::abs(n1)) || !std::isfinite(mean)) {
      std::ostringstream os;
      os << model_name << " evolution produced a non-finite state at step " << step
         << " (tau = " << tau << ")";
      if (!traj.trace.m.empty())
        os << "; last finite M = " << traj.trace.m.back() << " at tau = " << traj.trace.times.back();
      throw NumericalError(os.str());
    }
    RealVec s = model.intensity(psi);
    const double norm_error = std::abs(mean - 1.0);
    traj.max_norm_error = std::max(traj.max_norm_error, norm_error);
    if (keep_trace) {
      traj.trace.push(tau, std::abs(n1), std::abs(density_mode(grid, density, 2.0)));
      traj.mode1.push_back(n1);
      traj.potential_mode2.push_back(std::abs(density_mode(grid, model.potential(s), 2.0)));
      traj.norm_error.push_back(norm_error);
      if (has_energy) traj.energy.push_back(model.energy(psi));
    }
    return s;
  };

  const std::size_t snap_stride = settings.snapshot_stride;
  for (std::size_t step = 0;; ++step) {
    const bool want_trace = step % trace_stride == 0 || step == n_steps;
    const bool want_snap = snap_stride > 0 && (step % snap_stride == 0 || step == n_steps);
    if (want_trace || want_snap) {
      RealVec s = sample(step, want_trace);
      if (want_snap) {
        Snapshot snap{step, static_cast<double>(step) * settings.dtau, psi, std::move(s)};
        if (observer) observer(snap);
        if (settings.keep_snapshots) traj.snapshots.push_back(std::move(snap));
      }
    }
    if (step == n_steps) break;
    model.step(psi, settings.dtau);
  }

  const double kmax = grid.kappa(grid.size() / 2);
  if (kmax * kmax * settings.dtau > std::numbers::pi) {
    std::ostringstream os;
    os << "kappa_max^2 * dtau = " << kmax * kmax * settings.dtau
       << " exceeds pi: split-step resonances can seed grid-scale noise";
    traj.warnings.push_back(os.str());
  }
  const double phase = model.max_phase(settings.dtau);
  if (phase > 0.5) {
    std::ostringstream os;
    os << "dtau * max|V| = " << phase << " rad exceeds 0.5: potential step is under-resolved";
    traj.warnings.push_back(os.str());
  }
  return traj;
}

}  // namespace

Trajectory evolve(Model model, const SimulationSettings& settings, const SnapshotObserver& observer) {
  const Grid grid = settings.grid();
  switch (model) {
    case Model::smf: {
      SmfAdapter adapter{smf::Solver(settings.params, grid), settings.params};
      return run(adapter, settings, false, "smf", observer);
    }
    case Model::hmf: {
      const double drive = compute_drive(settings.params).epsilon_over_omega_r;
      HmfAdapter adapter{hmf::Solver(drive, grid), settings.params};
      return run(adapter, settings, true, "hmf", observer);
    }
    case Model::reduced:
      throw ConfigError("the reduced model has no field evolution; use reduced::integrate");
  }
  throw ConfigError("unknown model");
}

}  // namespace optohmf
