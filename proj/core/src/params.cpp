#include "optohmf/params.hpp"

#include <cmath>
#include <sstream>

#include "optohmf/error.hpp"

namespace optohmf {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::parameter: return "parameter";
    case ErrorCategory::config: return "config";
    case ErrorCategory::grid: return "grid";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::fit: return "fit";
    case ErrorCategory::io: return "io";
    case ErrorCategory::domain: return "domain";
  }
  return "unknown";
}

namespace {

void require(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    throw ParameterError(os.str());
  }
}

}  // namespace

std::vector<std::string> validate(const PhysParams& p) {
  require(std::isfinite(p.b0) && p.b0 > 0.0, "b0 must be positive", p.b0);
  require(std::isfinite(p.delta_hat) && std::abs(p.delta_hat) >= 1.0,
          "|delta| must be at least 1 (far-detuned model)", p.delta_hat);
  require(std::isfinite(p.p0) && p.p0 > 0.0, "p0 must be positive", p.p0);
  require(std::isfinite(p.R) && p.R > 0.0 && p.R <= 1.0, "R must lie in (0, 1]", p.R);
  require(std::isfinite(p.omega_r_hat) && p.omega_r_hat > 0.0,
          "omega_r/Gamma must be positive", p.omega_r_hat);

  std::vector<std::string> warnings;
  if (std::abs(p.delta_hat) < 100.0) {
    std::ostringstream os;
    os << "|delta| = " << std::abs(p.delta_hat) << " < 100: far-detuning assumption is weak";
    warnings.push_back(os.str());
  }
  const double chi0 = std::abs(compute_chi0(p));
  if (chi0 > 0.05) {
    std::ostringstream os;
    os << "chi0 = " << chi0 << " > 0.05: outside the linear HMF mapping regime";
    warnings.push_back(os.str());
  }
  return warnings;
}

double compute_chi0(const PhysParams& p) {
  if (p.delta_hat == 0.0) throw ParameterError("zero detuning: chi0 undefined");
  require(p.b0 > 0.0, "b0 must be positive", p.b0);
  return p.b0 / (2.0 * p.delta_hat);
}

double compute_pth(const PhysParams& p) {
  require(p.b0 > 0.0, "b0 must be positive", p.b0);
  require(p.R > 0.0 && p.R <= 1.0, "R must lie in (0, 1]", p.R);
  require(p.omega_r_hat > 0.0, "omega_r/Gamma must be positive", p.omega_r_hat);
  return 2.0 * p.omega_r_hat / (p.b0 * p.R);
}

DerivedParams compute_drive(const PhysParams& p) {
  DerivedParams d;
  d.chi0 = compute_chi0(p);
  d.p_th = compute_pth(p);
  d.epsilon_over_omega_r = p.R * p.p0 * p.b0 / (2.0 * p.omega_r_hat);
  return d;
}

double potential_scale(const PhysParams& p) { return p.delta_hat / (4.0 * p.omega_r_hat); }

PhysParams with_pump_ratio(PhysParams base, double ratio) {
  base.p0 = ratio * compute_pth(base);
  return base;
}

}  // namespace optohmf
