#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optohmf/droplet.hpp"
#include "optohmf/simulation.hpp"

namespace optohmf {

enum class SweepObservable { m_max, growth_rate, droplet_width };
enum class SeedPolicy { fixed, per_row };

struct SweepSection {
  std::string key;   ///< config key being swept, e.g. physics.pump_ratio
  RealVec values;
  SweepObservable observable = SweepObservable::m_max;
  SeedPolicy seed_policy = SeedPolicy::per_row;
};

struct DropletSection {
  double discard_fraction = 0.2;
  bool fixed_initial_width = false;
  double validity_threshold = 0.1;
};

enum class Origin { default_value, file, override };

struct Provenance {
  Origin origin = Origin::default_value;
  int line = 0;  ///< source line for Origin::file
};

/// Fully resolved run description.
struct RunConfig {
  Model model = Model::smf;
  SimulationSettings sim;
  /// Set when the pump is given relative to threshold; p0 is then derived.
  std::optional<double> pump_ratio;
  std::string output_dir = "run";
  std::size_t workers = 1;
  SweepSection sweep;
  DropletSection droplet;
  std::map<std::string, Provenance> provenance;

  /// Recomputes p0 from pump_ratio (if set) and validates physics and grid.
  /// Returns soft warnings.
  std::vector<std::string> resolve();

  /// Canonical `[section] key = value` text with every key, defaults included.
  std::string to_text() const;

  /// 64-bit FNV-1a of to_text(), as 16 hex digits. run.output and
  /// run.workers are excluded.
  std::string hash() const;

  droplet::ScanOptions scan_options() const;
};

struct KeyInfo {
  std::string key;  ///< section.name
  std::string type;
  std::string default_value;
  std::string description;
};

/// Every recognised key, in canonical order.
const std::vector<KeyInfo>& config_keys();

/// Parses the line-based format: `[section]` headers, `key = value` lines,
/// `#` or `;` comments. Unknown keys, duplicates, type mismatches and
/// missing required keys throw ConfigError.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

/// Applies `section.key=value` after parsing and records it as an override.
void apply_override(RunConfig& config, std::string_view assignment);
void set_value(RunConfig& config, const std::string& key, const std::string& value,
               Provenance provenance);

std::string_view to_string(Model model) noexcept;
std::string_view to_string(SweepObservable observable) noexcept;
std::string_view to_string(SeedPolicy policy) noexcept;
std::string_view to_string(Origin origin) noexcept;

/// Shortest round-trip text for a double.
std::string format_double(double value);

}  // namespace optohmf
