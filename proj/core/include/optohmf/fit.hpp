#pragma once

#include <span>

#include "optohmf/spectral.hpp"

namespace optohmf {

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  double exponent_stderr = 0.0;
  RealVec residuals;  ///< log-space residuals per point
};

/// y = prefactor * x^exponent by least squares on (log x, log y).
/// Throws FitError for fewer than 4 points, non-positive data or degenerate x.
FitResult powerlaw_fit(std::span<const double> x, std::span<const double> y);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double rms_residual = 0.0;
  double r2 = 0.0;
};

LineFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace optohmf
