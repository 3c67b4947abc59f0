#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "optohmf/params.hpp"
#include "optohmf/spectral.hpp"

namespace optohmf::droplet {

enum class EnergyForm {
  exact,      ///< 1/(2 sigma^2) - drive exp(-sigma^2/2)
  quadratic,  ///< small-sigma expansion 1/(2 sigma^2) - drive + drive sigma^2/2
};

/// Gaussian-ansatz energy E(sigma) / (hbar omega_r), sigma in theta units.
double energy(double sigma, double drive, EnergyForm form = EnergyForm::exact);

struct OptimalWidth {
  double sigma_closed = 0.0;   ///< (1/drive)^(1/4)
  double sigma_numeric = 0.0;  ///< minimizer of the exact energy
  bool regime_warning = false; ///< drive <= 1: the narrow-droplet assumption fails

  /// Physical widths sigma_x / Lambda_c = sigma / (2 pi).
  double width_closed() const noexcept;
  double width_numeric() const noexcept;
};

/// Closed form plus golden-section minimization of the exact energy.
/// Throws DomainError when the exact energy has no interior minimum.
OptimalWidth optimal_sigma(double drive);

struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;    ///< theta of the peak
  double sigma = 0.0;     ///< density ~ exp(-(theta - c)^2 / sigma^2), theta units
  double baseline = 0.0;
  double residual = 0.0;  ///< RMS residual over the fit window
  std::size_t iterations = 0;

  double width() const noexcept;  ///< sigma_x / Lambda_c
};

/// Levenberg-Marquardt fit of amplitude, centre, width and baseline over the
/// peak region of a periodic density. Throws FitError for flat, multi-peaked
/// or non-convergent profiles.
GaussianFit fit_width(const Grid& grid, std::span<const double> density);

struct ScanOptions {
  std::size_t n_points = 256;
  double dtau = 1e-3;
  double t_end = 20.0;
  std::size_t snapshot_stride = 200;
  /// Leading fraction of the run discarded before widths are collected.
  double discard_fraction = 0.2;
  /// Start every run at the fixed width below instead of the closed form.
  bool fixed_initial_width = false;
  double initial_width = 0.07;
  /// chi0 * n_peak above this flags the row as outside the mapping regime.
  double validity_threshold = 0.1;
  std::size_t workers = 1;
};

struct ScanRow {
  double p0 = 0.0;
  double drive = 0.0;
  double sigma_fit = 0.0;      ///< median fitted sigma_x / Lambda_c
  double sigma_closed = 0.0;   ///< (1/drive)^(1/4) / (2 pi)
  double residual = 0.0;       ///< median RMS fit residual
  double width_variation = 0.0;  ///< max |width - median| / median over the window
  double width_spread = 0.0;     ///< (max - min) / median
  double chi0_n_peak = 0.0;
  double max_norm_error = 0.0;
  bool mapping_warning = false;
  bool regime_warning = false;
  std::string error;           ///< empty on success

  bool ok() const noexcept { return error.empty(); }
};

/// One droplet run: smf evolution on a single-period grid from a Gaussian,
/// per-snapshot width fits after the transient, median width.
ScanRow droplet_run(double p0, const PhysParams& base, const ScanOptions& options);

/// Rows in input order. Rows run concurrently up to options.workers; a failed
/// row carries its error instead of aborting the scan.
std::vector<ScanRow> droplet_scan(std::span<const double> p0_list, const PhysParams& base,
                                  const ScanOptions& options);

}  // namespace optohmf::droplet
