#include "optohmf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "optohmf/error.hpp"
#include "optohmf/fit.hpp"

namespace optohmf {

Complex density_mode(const Grid& grid, std::span<const double> density, double kappa) {
  if (density.size() != grid.size()) throw GridError("field does not match grid");
  grid.index_of(kappa);  // validates resolvability
  // Direct single-coefficient DFT; matches the transform's normalization.
  Complex sum{0.0, 0.0};
  const double dtheta = grid.spacing();
  for (std::size_t i = 0; i < density.size(); ++i)
    sum += density[i] * std::polar(1.0, -kappa * dtheta * static_cast<double>(i));
  return sum / static_cast<double>(density.size());
}

Complex mode_amplitude(const Grid& grid, std::span<const Complex> psi, double kappa) {
  RealVec density(psi.size());
  std::transform(psi.begin(), psi.end(), density.begin(), [](Complex v) { return std::norm(v); });
  return density_mode(grid, density, kappa);
}

double magnetization(const Grid& grid, std::span<const Complex> psi) {
  return std::abs(mode_amplitude(grid, psi, 1.0));
}

std::vector<Pulse> find_pulses(const MagnetizationTrace& trace, double fraction) {
  std::vector<Pulse> pulses;
  if (trace.size() == 0) return pulses;
  const double threshold = fraction * *std::max_element(trace.m.begin(), trace.m.end());
  bool inside = false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.m[i] < threshold || !(threshold > 0.0)) {
      inside = false;
      continue;
    }
    if (!inside) pulses.push_back({i, trace.times[i], trace.m[i]});
    inside = true;
    if (trace.m[i] > pulses.back().value) pulses.back() = {i, trace.times[i], trace.m[i]};
  }
  return pulses;
}

GrowthFit growth_rate_fit(const MagnetizationTrace& trace) {
  if (trace.size() < 2) throw FitError("trace too short for a growth-rate fit");
  const double m_start = trace.m.front();
  const double m_peak = *std::max_element(trace.m.begin(), trace.m.end());
  if (!(m_start > 0.0)) throw FitError("trace starts at M = 0; no seed to grow from");
  const double lower = 3.0 * m_start;
  const double upper = 0.1 * m_peak;
  if (!(upper > lower))
    throw FitError("no linear-regime window: 0.1 * peak M does not exceed 3 * seed");

  std::size_t i0 = trace.size();
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace.m[i] > lower) {
      i0 = i;
      break;
    }
  std::size_t i1 = trace.size();
  for (std::size_t i = i0; i < trace.size(); ++i)
    if (trace.m[i] > upper) {
      i1 = i;
      break;
    }
  if (i0 >= trace.size() || i1 >= trace.size() || i1 <= i0)
    throw FitError("growth window not found in trace");
  return growth_rate_fit(trace, FitWindow{trace.times[i0], trace.times[i1]});
}

GrowthFit growth_rate_fit(const MagnetizationTrace& trace, FitWindow window) {
  RealVec t, log_m;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.times[i] < window.t_begin || trace.times[i] > window.t_end) continue;
    if (!(trace.m[i] > 0.0)) throw FitError("non-positive M inside the fit window");
    if (!log_m.empty() && std::log(trace.m[i]) < log_m.back()) {
      std::ostringstream os;
      os << "M is not monotone inside the fit window at tau = " << trace.times[i];
      throw FitError(os.str());
    }
    t.push_back(trace.times[i]);
    log_m.push_back(std::log(trace.m[i]));
  }
  if (t.size() < 3) throw FitError("fewer than 3 samples in the growth window");
  const LineFit line = linear_fit(t, log_m);
  GrowthFit fit;
  fit.rate = line.slope;
  fit.residual = line.rms_residual;
  fit.t_begin = t.front();
  fit.t_end = t.back();
  fit.points = t.size();
  return fit;
}

ScatteringBudget scattering_ratio(double beta, double b0, double R) {
  if (!(beta > 1.0)) {
    std::ostringstream os;
    os << "beta = " << beta << " is not above threshold";
    throw DomainError(os.str());
  }
  if (!(b0 > 0.0) || !(R > 0.0 && R <= 1.0))
    throw ParameterError("scattering budget needs b0 > 0 and R in (0, 1]");
  ScatteringBudget budget;
  budget.beta = beta;
  budget.growth_rate = std::sqrt(beta - 1.0);
  budget.scattering_rate = (1.0 + R) * beta / (b0 * R);
  budget.ratio = b0 * R / ((1.0 + R) * beta) * std::sqrt(beta - 1.0);
  return budget;
}

}  // namespace optohmf
