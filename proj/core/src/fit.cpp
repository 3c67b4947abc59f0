#include "optohmf/fit.hpp"

#include <cmath>
#include <numeric>

#include "optohmf/error.hpp"

namespace optohmf {

LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw FitError("x and y differ in length");
  if (n < 2) throw FitError("need at least two points for a line");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("degenerate abscissa: all x equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.rms_residual = std::sqrt(ss_res / n);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return fit;
}

FitResult powerlaw_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw FitError("x and y differ in length");
  if (x.size() < 4) throw FitError("power-law fit needs at least 4 points");
  RealVec lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitError("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const LineFit line = linear_fit(lx, ly);
  FitResult result;
  result.exponent = line.slope;
  result.prefactor = std::exp(line.intercept);
  result.r2 = line.r2;
  result.exponent_stderr = line.slope_stderr;
  result.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    result.residuals[i] = ly[i] - (line.intercept + line.slope * lx[i]);
  return result;
}

}  // namespace optohmf
