#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optohmf/config.hpp"
#include "optohmf/fit.hpp"

namespace optohmf::sweep {

struct Row {
  double value = 0.0;       ///< swept key value
  double p0 = 0.0;
  double drive = 0.0;
  double observable = 0.0;  ///< M_max, G/omega_r or sigma_x/Lambda_c
  double aux = 0.0;         ///< fit residual or width variation
  double max_norm_error = 0.0;
  std::uint64_t seed = 0;
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct Table {
  std::string key;
  SweepObservable observable = SweepObservable::m_max;
  std::vector<Row> rows;  ///< sorted by swept value
};

/// Seed for row `index` under `policy`, independent of worker count.
std::uint64_t row_seed(std::uint64_t base_seed, SeedPolicy policy, std::size_t index) noexcept;

/// Runs one evolution per value of config.sweep. Rows execute on
/// config.workers threads; failures are recorded per row. Throws
/// NumericalError only if every row failed.
Table run_sweep(const RunConfig& config);

/// Fit of the observable against the swept value (or against p0 - p_th when
/// relative_to_threshold is set, for the magnetization scaling law).
FitResult fit_table(const Table& table, bool relative_to_threshold);

}  // namespace optohmf::sweep
