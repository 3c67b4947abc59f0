#include "optohmf/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "optohmf/droplet.hpp"
#include "optohmf/error.hpp"
#include "optohmf/reduced.hpp"
#include "parallel.hpp"

namespace optohmf::sweep {

std::uint64_t row_seed(std::uint64_t base_seed, SeedPolicy policy, std::size_t index) noexcept {
  return policy == SeedPolicy::fixed ? base_seed : base_seed + index;
}

namespace {

// Magnetization maximum of the two-state model over [0, t_end].
double reduced_peak(const RunConfig& config, double drive) {
  const double m0 = config.sim.initial.amplitude;
  reduced::State start;
  if (config.sim.initial.growing_mode && drive > 1.0) {
    start = reduced::homoclinic_state(m0, drive);
  } else {
    start.S = m0;
    start.D = -1.0 + drive * m0 * m0;
  }
  const auto traj = reduced::integrate(start, drive, config.sim.dtau, config.sim.steps());
  double peak = 0.0;
  for (const auto& s : traj.samples) peak = std::max(peak, s.state.S.real());
  return peak;
}

Row run_row(const RunConfig& base, double value, std::uint64_t seed) {
  Row row;
  row.value = value;
  row.seed = seed;
  try {
    RunConfig config = base;
    set_value(config, config.sweep.key, format_double(value), Provenance{Origin::override, 0});
    config.resolve();
    config.sim.seed = seed;
    config.sim.snapshot_stride = 0;
    config.sim.keep_snapshots = false;
    row.p0 = config.sim.params.p0;
    row.drive = compute_drive(config.sim.params).epsilon_over_omega_r;

    if (config.model == Model::reduced) {
      if (config.sweep.observable != SweepObservable::m_max)
        throw ConfigError("the reduced model supports only the m_max observable");
      row.observable = reduced_peak(config, row.drive);
      return row;
    }

    const Trajectory traj = evolve(config.model, config.sim);
    row.max_norm_error = traj.max_norm_error;
    switch (config.sweep.observable) {
      case SweepObservable::m_max: {
        const auto it = std::max_element(traj.trace.m.begin(), traj.trace.m.end());
        row.observable = *it;
        row.aux = traj.trace.times[static_cast<std::size_t>(it - traj.trace.m.begin())];
        break;
      }
      case SweepObservable::growth_rate: {
        const GrowthFit fit = growth_rate_fit(traj.trace);
        row.observable = fit.rate;
        row.aux = fit.residual;
        break;
      }
      case SweepObservable::droplet_width:
        throw ConfigError("droplet_width rows are produced by the droplet scan");
    }
  } catch (const Error& e) {
    row.error = std::string(to_string(e.category())) + ": " + e.what();
  }
  return row;
}

}  // namespace

Table run_sweep(const RunConfig& config) {
  if (config.sweep.key.empty()) throw ConfigError("sweep.key is not set");
  Table table;
  table.key = config.sweep.key;
  table.observable = config.sweep.observable;

  RealVec values = config.sweep.values;
  std::sort(values.begin(), values.end());
  table.rows.resize(values.size());

  if (config.sweep.observable == SweepObservable::droplet_width) {
    // Delegate row-for-row to the droplet scan, which sweeps absolute p0.
    RealVec p0_list(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      RunConfig row_config = config;
      set_value(row_config, config.sweep.key, format_double(values[i]), Provenance{Origin::override, 0});
      row_config.resolve();
      p0_list[i] = row_config.sim.params.p0;
    }
    const auto rows = droplet::droplet_scan(p0_list, config.sim.params, config.scan_options());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Row& row = table.rows[i];
      row.value = values[i];
      row.p0 = rows[i].p0;
      row.drive = rows[i].drive;
      row.observable = rows[i].sigma_fit;
      row.aux = rows[i].width_variation;
      row.max_norm_error = rows[i].max_norm_error;
      row.seed = row_seed(config.sim.seed, config.sweep.seed_policy, i);
      row.error = rows[i].error;
    }
  } else {
    detail::parallel_for(values.size(), config.workers, [&](std::size_t i) {
      table.rows[i] = run_row(config, values[i], row_seed(config.sim.seed, config.sweep.seed_policy, i));
    });
  }

  if (!table.rows.empty() &&
      std::none_of(table.rows.begin(), table.rows.end(), [](const Row& r) { return r.ok(); }))
    throw NumericalError("every sweep row failed; first error: " + table.rows.front().error);
  return table;
}

FitResult fit_table(const Table& table, bool relative_to_threshold) {
  RealVec x, y;
  for (const auto& row : table.rows) {
    if (!row.ok()) continue;
    x.push_back(relative_to_threshold ? row.p0 * (1.0 - 1.0 / row.drive) : row.value);
    y.push_back(row.observable);
  }
  return powerlaw_fit(x, y);
}

}  // namespace optohmf::sweep
