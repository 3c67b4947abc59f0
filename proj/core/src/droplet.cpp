#include "optohmf/droplet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "optohmf/error.hpp"
#include "optohmf/simulation.hpp"
#include "parallel.hpp"

namespace optohmf::droplet {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double energy(double sigma, double drive, EnergyForm form) {
  if (!(sigma > 0.0)) throw DomainError("droplet width must be positive");
  const double kinetic = 1.0 / (2.0 * sigma * sigma);
  if (form == EnergyForm::quadratic) return kinetic - drive + 0.5 * drive * sigma * sigma;
  return kinetic - drive * std::exp(-0.5 * sigma * sigma);
}

double OptimalWidth::width_closed() const noexcept { return sigma_closed / kTwoPi; }
double OptimalWidth::width_numeric() const noexcept { return sigma_numeric / kTwoPi; }

OptimalWidth optimal_sigma(double drive) {
  if (!(drive > 0.0)) throw DomainError("no droplet without drive: energy has no minimum");
  OptimalWidth w;
  w.sigma_closed = std::pow(1.0 / drive, 0.25);
  w.regime_warning = drive <= 1.0;

  // dE/dsigma = -1/sigma^3 + drive sigma exp(-sigma^2/2) changes sign on
  // (0, 2] only if drive * max(sigma^4 exp(-sigma^2/2)) = drive * 16/e^2 > 1.
  if (drive * 16.0 * std::exp(-2.0) <= 1.0)
    throw DomainError("exact Gaussian energy has no interior minimum at this drive");
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 1e-3, b = 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = energy(c, drive), fd = energy(d, drive);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = energy(c, drive);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = energy(d, drive);
    }
  }
  w.sigma_numeric = 0.5 * (a + b);
  return w;
}

double GaussianFit::width() const noexcept { return sigma / kTwoPi; }

namespace {

double wrap(double d, double length) { return d - length * std::round(d / length); }

}  // namespace

GaussianFit fit_width(const Grid& grid, std::span<const double> density) {
  const std::size_t n = grid.size();
  if (density.size() != n) throw GridError("density does not match grid");
  const auto [min_it, max_it] = std::minmax_element(density.begin(), density.end());
  const double lo = *min_it, hi = *max_it;
  double mean = 0.0;
  for (double v : density) mean += v;
  mean /= static_cast<double>(n);
  if (!(mean > 0.0) || (hi - lo) / mean < 0.05) throw FitError("density has no peak to fit");

  // Count circular runs above half maximum: one run means one peak.
  const double half = lo + 0.5 * (hi - lo);
  std::size_t start = static_cast<std::size_t>(min_it - density.begin());
  std::size_t runs = 0;
  bool above = false;
  for (std::size_t k = 0; k < n; ++k) {
    const bool now = density[(start + k) % n] > half;
    if (now && !above) ++runs;
    above = now;
  }
  if (runs != 1) {
    std::ostringstream os;
    os << "density has " << runs << " peaks above half maximum";
    throw FitError(os.str());
  }

  const std::size_t peak = static_cast<std::size_t>(max_it - density.begin());
  const double length = grid.length();
  const double dtheta = grid.spacing();
  std::size_t half_width_points = 0;
  while (half_width_points < n / 2 && density[(peak + half_width_points) % n] > half)
    ++half_width_points;
  std::size_t above_half = 0;
  for (double v : density) above_half += v > half ? 1 : 0;
  if (above_half < 3) throw FitError("peak is under-resolved: fewer than 3 points above half maximum");
  const double hwhm = std::max(1.0, static_cast<double>(half_width_points)) * dtheta;
  double sigma0 = hwhm / std::sqrt(std::log(2.0));

  // Window of +-3 sigma around the peak, at most half the domain.
  const double reach = std::min(3.0 * sigma0, 0.5 * length - dtheta);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = wrap(grid.theta(i) - grid.theta(peak), length);
    if (std::abs(d) <= reach) {
      xs.push_back(d);
      ys.push_back(density[i]);
    }
  }
  if (xs.size() < 6) throw FitError("peak is under-resolved: fewer than 6 points in the window");

  Eigen::Vector4d p(hi - lo, 0.0, sigma0, lo);
  const std::size_t m = xs.size();
  auto residuals = [&](const Eigen::Vector4d& q, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < m; ++i) {
      const double u = (xs[i] - q[1]) / q[2];
      r[i] = q[0] * std::exp(-u * u) + q[3] - ys[i];
    }
    return r.squaredNorm();
  };

  Eigen::VectorXd r(m), r_trial(m);
  Eigen::MatrixXd jac(m, 4);
  double cost = residuals(p, r);
  double lambda = 1e-3;
  bool converged = false;
  std::size_t iter = 0;
  for (; iter < 200 && !converged; ++iter) {
    for (std::size_t i = 0; i < m; ++i) {
      const double dx = xs[i] - p[1];
      const double u = dx / p[2];
      const double e = std::exp(-u * u);
      jac(i, 0) = e;
      jac(i, 1) = p[0] * e * 2.0 * dx / (p[2] * p[2]);
      jac(i, 2) = p[0] * e * 2.0 * dx * dx / (p[2] * p[2] * p[2]);
      jac(i, 3) = 1.0;
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * r;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::Vector4d delta = a.ldlt().solve(-grad);
      const Eigen::Vector4d trial = p + delta;
      if (trial[2] > 0.0) {
        const double trial_cost = residuals(trial, r_trial);
        if (trial_cost <= cost) {
          const double rel_step = delta.norm() / (p.norm() + 1e-300);
          const double rel_drop = (cost - trial_cost) / (cost + 1e-300);
          p = trial;
          r = r_trial;
          cost = trial_cost;
          lambda = std::max(lambda * 0.1, 1e-12);
          improved = true;
          converged = rel_step < 1e-12 || rel_drop < 1e-14 || cost < 1e-28;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!improved) converged = true;  // no downhill step left: at a minimum
  }

  GaussianFit fit;
  fit.amplitude = p[0];
  fit.center = std::fmod(grid.theta(peak) + p[1] + length, length);
  fit.sigma = std::abs(p[2]);
  fit.baseline = p[3];
  fit.residual = std::sqrt(cost / static_cast<double>(m));
  fit.iterations = iter;
  if (!converged || !std::isfinite(fit.sigma) || fit.amplitude <= 0.0 || fit.sigma > 0.5 * length) {
    std::ostringstream os;
    os << "Gaussian fit did not converge (sigma = " << fit.sigma << ", residual " << fit.residual << ")";
    throw FitError(os.str(), fit.residual);
  }
  return fit;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

ScanRow droplet_run(double p0, const PhysParams& base, const ScanOptions& options) {
  ScanRow row;
  row.p0 = p0;
  try {
    PhysParams params = base;
    params.p0 = p0;
    validate(params);
    const DerivedParams derived = compute_drive(params);
    row.drive = derived.epsilon_over_omega_r;
    row.sigma_closed = std::pow(1.0 / row.drive, 0.25) / kTwoPi;
    row.regime_warning = row.drive <= 1.0;

    SimulationSettings settings;
    settings.params = params;
    settings.n_points = options.n_points;
    settings.n_periods = 1;
    settings.dtau = options.dtau;
    settings.t_end = options.t_end;
    settings.snapshot_stride = std::max<std::size_t>(1, options.snapshot_stride);
    settings.trace_stride = settings.snapshot_stride;
    settings.keep_snapshots = false;
    settings.initial.kind = InitialKind::gaussian;
    settings.initial.width = options.fixed_initial_width ? options.initial_width : row.sigma_closed;
    settings.initial.center = 0.5;

    const Grid grid = settings.grid();
    const double t_discard = options.discard_fraction * options.t_end;
    std::vector<double> widths, residuals, peaks;
    const Trajectory traj = evolve(Model::smf, settings, [&](const Snapshot& snap) {
      if (snap.tau < t_discard) return;
      RealVec density(snap.psi.size());
      std::transform(snap.psi.begin(), snap.psi.end(), density.begin(),
                     [](Complex v) { return std::norm(v); });
      const GaussianFit fit = fit_width(grid, density);
      widths.push_back(fit.width());
      residuals.push_back(fit.residual);
      peaks.push_back(fit.amplitude + fit.baseline);
    });
    if (widths.empty()) throw FitError("no snapshots after the transient window");

    row.max_norm_error = traj.max_norm_error;
    row.sigma_fit = median(widths);
    row.residual = median(residuals);
    const auto [wmin, wmax] = std::minmax_element(widths.begin(), widths.end());
    row.width_spread = (*wmax - *wmin) / row.sigma_fit;
    for (double w : widths)
      row.width_variation = std::max(row.width_variation, std::abs(w - row.sigma_fit) / row.sigma_fit);
    row.chi0_n_peak = std::abs(derived.chi0) * *std::max_element(peaks.begin(), peaks.end());
    row.mapping_warning = row.chi0_n_peak > options.validity_threshold;
  } catch (const Error& e) {
    row.error = std::string(to_string(e.category())) + ": " + e.what();
  }
  return row;
}

std::vector<ScanRow> droplet_scan(std::span<const double> p0_list, const PhysParams& base,
                                  const ScanOptions& options) {
  std::vector<ScanRow> rows(p0_list.size());
  detail::parallel_for(p0_list.size(), options.workers,
                       [&](std::size_t i) { rows[i] = droplet_run(p0_list[i], base, options); });
  return rows;
}

}  // namespace optohmf::droplet
