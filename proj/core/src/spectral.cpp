#include "optohmf/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "optohmf/error.hpp"

namespace optohmf {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(std::size_t n_points, int n_periods) : n_points_(n_points), n_periods_(n_periods) {
  if (n_periods < 1) throw GridError("grid needs at least one period");
  if (!is_power_of_two(n_points)) {
    std::ostringstream os;
    os << "grid size " << n_points << " is not a power of two";
    throw GridError(os.str());
  }
  if (n_points < 16 * static_cast<std::size_t>(n_periods)) {
    std::ostringstream os;
    os << "grid resolves " << n_points / n_periods << " points per period, need >= 16";
    throw GridError(os.str());
  }
}

double Grid::length() const noexcept { return 2.0 * std::numbers::pi * n_periods_; }

double Grid::spacing() const noexcept { return length() / static_cast<double>(n_points_); }

double Grid::theta(std::size_t i) const noexcept {
  return static_cast<double>(i) * spacing();
}

double Grid::kappa(std::size_t j) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(n_points_);
  auto signed_j = static_cast<std::ptrdiff_t>(j);
  if (signed_j >= n / 2) signed_j -= n;
  return static_cast<double>(signed_j) / n_periods_;
}

std::size_t Grid::index_of(double kappa) const {
  const double scaled = kappa * n_periods_;
  const double rounded = std::round(scaled);
  const auto n = static_cast<std::ptrdiff_t>(n_points_);
  if (std::abs(scaled - rounded) > 1e-9 || rounded < -static_cast<double>(n / 2) ||
      rounded >= static_cast<double>(n / 2)) {
    std::ostringstream os;
    os << "wavenumber " << kappa << " is not resolvable on a " << n_points_ << "-point, "
       << n_periods_ << "-period grid";
    throw GridError(os.str());
  }
  auto j = static_cast<std::ptrdiff_t>(rounded);
  if (j < 0) j += n;
  return static_cast<std::size_t>(j);
}

struct Fft::Impl {
  std::size_t n;
  fftw_complex* buffer;
  fftw_plan forward;
  fftw_plan backward;

  explicit Impl(std::size_t size) : n(size) {
    buffer = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    forward = fftw_plan_dft_1d(ni, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(ni, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buffer);
  }

  Complex* data() { return reinterpret_cast<Complex*>(buffer); }
};

Fft::Fft(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

std::size_t Fft::size() const noexcept { return impl_->n; }

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) {
  if (in.size() != impl_->n || out.size() != impl_->n) throw GridError("transform size mismatch");
  Complex* work = impl_->data();
  std::copy(in.begin(), in.end(), work);
  fftw_execute(impl_->forward);
  const double scale = 1.0 / static_cast<double>(impl_->n);
  for (std::size_t j = 0; j < impl_->n; ++j) out[j] = work[j] * scale;
}

void Fft::inverse(std::span<const Complex> in, std::span<Complex> out) {
  if (in.size() != impl_->n || out.size() != impl_->n) throw GridError("transform size mismatch");
  Complex* work = impl_->data();
  std::copy(in.begin(), in.end(), work);
  fftw_execute(impl_->backward);
  std::copy(work, work + impl_->n, out.begin());
}

SpectralEngine::SpectralEngine(const Grid& grid)
    : grid_(grid), fft_(grid.size()), kappa2_(grid.size()), kinetic_(grid.size()) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.kappa(j);
    kappa2_[j] = k * k;
  }
}

SpectralField SpectralEngine::to_modes(const SpectralField& field) {
  if (field.representation != Representation::position)
    throw GridError("to_modes expects a position-space field");
  if (field.values.size() != grid_.size()) throw GridError("field does not match grid");
  SpectralField out{ComplexVec(field.values.size()), Representation::modes};
  fft_.forward(field.values, out.values);
  return out;
}

SpectralField SpectralEngine::to_position(const SpectralField& field) {
  if (field.representation != Representation::modes)
    throw GridError("to_position expects a mode-space field");
  if (field.values.size() != grid_.size()) throw GridError("field does not match grid");
  SpectralField out{ComplexVec(field.values.size()), Representation::position};
  fft_.inverse(field.values, out.values);
  return out;
}

void SpectralEngine::forward_in_place(std::span<Complex> values) { fft_.forward(values, values); }

void SpectralEngine::inverse_in_place(std::span<Complex> values) { fft_.inverse(values, values); }

void SpectralEngine::apply_kinetic(std::span<Complex> modes, double dtau) {
  if (modes.size() != grid_.size()) throw GridError("field does not match grid");
  if (dtau != cached_dtau_) {
    for (std::size_t j = 0; j < kappa2_.size(); ++j)
      kinetic_[j] = std::polar(1.0, -kappa2_[j] * dtau);
    cached_dtau_ = dtau;
  }
  for (std::size_t j = 0; j < modes.size(); ++j) modes[j] *= kinetic_[j];
}

SpectralField kinetic_propagator(const Grid& grid, const SpectralField& modes, double dtau) {
  if (modes.representation != Representation::modes)
    throw GridError("kinetic_propagator expects a mode-space field");
  if (modes.values.size() != grid.size()) throw GridError("field does not match grid");
  SpectralField out = modes;
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const double k = grid.kappa(j);
    out.values[j] *= std::polar(1.0, -k * k * dtau);
  }
  return out;
}

Complex diffraction_phase(double kappa) noexcept {
  return std::polar(1.0, -0.5 * std::numbers::pi * kappa * kappa);
}

double mean_square(std::span<const Complex> values) noexcept {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace optohmf
