#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "optohmf/diagnostics.hpp"
#include "optohmf/params.hpp"
#include "optohmf/spectral.hpp"

namespace optohmf {

enum class Model { smf, hmf, reduced };

enum class InitialKind { cosine, gaussian, file };

struct InitialCondition {
  InitialKind kind = InitialKind::cosine;
  /// Cosine seed a0 in psi = 1 + a0 cos(theta).
  double amplitude = 1e-3;
  /// RMS of the optional multimode noise added on top of the cosine seed.
  double noise_rms = 0.0;
  /// Seed the kappa = 1 mode along the linearly unstable eigenvector,
  /// c1 = a0 (1 + i sqrt(drive - 1)), so growth is exponential from tau = 0.
  bool growing_mode = false;
  /// Gaussian width sigma_x / Lambda_c with psi ~ exp(-x^2 / (2 sigma_x^2)).
  double width = 0.07;
  /// Gaussian centre as a fraction of the domain.
  double center = 0.5;
  /// Snapshot file for kind == file.
  std::string path;
};

struct SimulationSettings {
  PhysParams params;
  std::size_t n_points = 1024;
  int n_periods = 8;
  double dtau = 1e-3;
  double t_end = 200.0;
  /// Snapshot every this many steps; 0 disables snapshots.
  std::size_t snapshot_stride = 0;
  /// Trace sample every this many steps (at least 1).
  std::size_t trace_stride = 10;
  InitialCondition initial;
  std::uint64_t seed = 1;
  /// Keep snapshots in the returned Trajectory (the CLI streams instead).
  bool keep_snapshots = true;

  Grid grid() const { return Grid(n_points, n_periods); }
  std::size_t steps() const;
};

struct Snapshot {
  std::size_t step = 0;
  double tau = 0.0;
  ComplexVec psi;
  RealVec intensity;  ///< saturation parameter s(theta), or its HMF equivalent
};

/// Callback for streamed snapshots.
using SnapshotObserver = std::function<void(const Snapshot&)>;

struct Trajectory {
  MagnetizationTrace trace;
  ComplexVec mode1;           ///< signed n^(1) at each trace sample
  RealVec potential_mode2;    ///< |kappa=2 harmonic| of the effective Phi
  RealVec norm_error;         ///< |mean density - 1| at each trace sample
  RealVec energy;             ///< HMF energy per trace sample, empty for smf
  std::vector<Snapshot> snapshots;
  double max_norm_error = 0.0;
  std::vector<std::string> warnings;
};

/// Initial wavefunction normalized to mean density 1. `drive` is eps/omega_r
/// (used by growing-mode seeding).
ComplexVec make_initial_state(const Grid& grid, const InitialCondition& initial,
                              double drive, std::uint64_t seed);

/// Rescales psi to mean density exactly 1.
void normalize(std::span<Complex> psi);

Trajectory evolve(Model model, const SimulationSettings& settings,
                  const SnapshotObserver& observer = {});

}  // namespace optohmf
