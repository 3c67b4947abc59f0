#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace optohmf {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;
using RealVec = std::vector<double>;

/// Periodic grid in theta = q_c x. The domain holds n_periods pattern periods
/// (each 2*pi long); mode j of the discrete transform has wavenumber
/// kappa_j = j / n_periods in units of q_c.
class Grid {
 public:
  Grid(std::size_t n_points, int n_periods);

  std::size_t size() const noexcept { return n_points_; }
  int periods() const noexcept { return n_periods_; }
  double length() const noexcept;
  double spacing() const noexcept;
  double theta(std::size_t i) const noexcept;

  /// Wavenumber of transform index j (FFT ordering: 0..N/2-1, -N/2..-1).
  double kappa(std::size_t j) const noexcept;

  /// Transform index of wavenumber kappa. Throws GridError when kappa is not
  /// a multiple of 1/n_periods inside the resolvable band.
  std::size_t index_of(double kappa) const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_points_;
  int n_periods_;
};

enum class Representation { position, modes };

struct SpectralField {
  ComplexVec values;
  Representation representation = Representation::position;
};

/// One-dimensional complex DFT of a fixed size.
///
/// Forward transforms produce Fourier coefficients (divided by N), so a
/// constant field 1 maps to a single unit mode and cos(theta) to 1/2 at
/// kappa = +-1. Parseval therefore reads mean|f|^2 == sum|c|^2.
///
/// Plans are created under a process-wide lock; execution is thread-safe
/// across distinct instances. An instance is not safe to share between
/// threads because it owns its work buffer.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept;

  /// Position samples -> coefficients. `in` and `out` may alias.
  void forward(std::span<const Complex> in, std::span<Complex> out);
  /// Coefficients -> position samples. `in` and `out` may alias.
  void inverse(std::span<const Complex> in, std::span<Complex> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Grid plus transform plus cached kinetic multipliers.
class SpectralEngine {
 public:
  explicit SpectralEngine(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }

  SpectralField to_modes(const SpectralField& field);
  SpectralField to_position(const SpectralField& field);

  void forward_in_place(std::span<Complex> values);
  void inverse_in_place(std::span<Complex> values);

  /// Multiplies mode j by exp(-i kappa_j^2 dtau).
  void apply_kinetic(std::span<Complex> modes, double dtau);

  /// Multiplies mode j by factor(kappa_j).
  template <typename Fn>
  void apply_mode_factor(std::span<Complex> modes, Fn&& factor) const {
    for (std::size_t j = 0; j < modes.size(); ++j) modes[j] *= factor(grid_.kappa(j));
  }

 private:
  Grid grid_;
  Fft fft_;
  RealVec kappa2_;
  double cached_dtau_ = -1.0;
  ComplexVec kinetic_;
};

/// Free-particle propagator over dtau (units of 1/omega_r) in mode space.
SpectralField kinetic_propagator(const Grid& grid, const SpectralField& modes,
                                 double dtau);

/// Mirror round-trip diffraction exp(-i (pi/2) kappa^2) with q_c^2 d / k0
/// fixed at pi/2. The sqrt(R) factor is applied by the caller.
Complex diffraction_phase(double kappa) noexcept;

/// Mean of |f|^2 over the samples.
double mean_square(std::span<const Complex> values) noexcept;

}  // namespace optohmf
