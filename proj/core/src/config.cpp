#include "optohmf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "optohmf/error.hpp"

namespace optohmf {

std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::smf: return "smf";
    case Model::hmf: return "hmf";
    case Model::reduced: return "reduced";
  }
  return "unknown";
}

std::string_view to_string(SweepObservable observable) noexcept {
  switch (observable) {
    case SweepObservable::m_max: return "m_max";
    case SweepObservable::growth_rate: return "growth_rate";
    case SweepObservable::droplet_width: return "droplet_width";
  }
  return "unknown";
}

std::string_view to_string(SeedPolicy policy) noexcept {
  return policy == SeedPolicy::fixed ? "fixed" : "per_row";
}

std::string_view to_string(Origin origin) noexcept {
  switch (origin) {
    case Origin::default_value: return "default";
    case Origin::file: return "file";
    case Origin::override: return "override";
  }
  return "unknown";
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void type_error(const std::string& key, const std::string& value, const char* type) {
  throw ConfigError("key '" + key + "': cannot read '" + value + "' as " + type);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto result = std::from_chars(value.data(), end, out);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(out))
    type_error(key, value, "a finite number");
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  unsigned long long out = 0;
  const char* end = value.data() + value.size();
  const auto result = std::from_chars(value.data(), end, out);
  if (result.ec != std::errc() || result.ptr != end) type_error(key, value, "a non-negative integer");
  return static_cast<std::size_t>(out);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  type_error(key, value, "a boolean (true/false)");
}

RealVec parse_list(const std::string& key, const std::string& value) {
  RealVec out;
  std::string_view rest = value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item(trim(rest.substr(0, comma)));
    if (item.empty()) type_error(key, value, "a comma-separated list of numbers");
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::string format_list(const RealVec& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

// Range description for generated sweep values; lives only during parsing.
struct SweepRange {
  std::optional<double> start, stop;
  std::size_t count = 0;
  bool log_spacing = true;
};

struct KeySpec {
  KeyInfo info;
  bool required = false;
  bool numeric = false;
  std::function<void(RunConfig&, SweepRange&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
std::string num(T v) {
  if constexpr (std::is_floating_point_v<T>)
    return format_double(v);
  else
    return std::to_string(v);
}

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> s;
    auto add = [&s](std::string key, std::string type, std::string def, std::string desc,
                    bool required, bool numeric, auto set, auto get) {
      s.push_back(KeySpec{KeyInfo{std::move(key), std::move(type), std::move(def), std::move(desc)},
                          required, numeric, set, get});
    };
    using C = RunConfig;
    using Rg = SweepRange;
    using S = const std::string&;

    add("model.type", "smf|hmf|reduced", "", "model to evolve", true, false,
        [](C& c, Rg&, S v) {
          if (v == "smf") c.model = Model::smf;
          else if (v == "hmf") c.model = Model::hmf;
          else if (v == "reduced") c.model = Model::reduced;
          else type_error("model.type", v, "one of smf, hmf, reduced");
        },
        [](const C& c) { return std::string(to_string(c.model)); });

    add("physics.b0", "float", "", "optical thickness at resonance", true, true,
        [](C& c, Rg&, S v) { c.sim.params.b0 = parse_double("physics.b0", v); },
        [](const C& c) { return num(c.sim.params.b0); });
    add("physics.delta", "float", "", "detuning Delta = 2 delta / Gamma", true, true,
        [](C& c, Rg&, S v) { c.sim.params.delta_hat = parse_double("physics.delta", v); },
        [](const C& c) { return num(c.sim.params.delta_hat); });
    add("physics.p0", "float", "", "pump saturation parameter (or give physics.pump_ratio)", false,
        true,
        [](C& c, Rg&, S v) {
          c.sim.params.p0 = parse_double("physics.p0", v);
          c.pump_ratio.reset();
        },
        [](const C& c) { return num(c.sim.params.p0); });
    add("physics.pump_ratio", "float", "", "p0 / p_th; derives physics.p0", false, true,
        [](C& c, Rg&, S v) { c.pump_ratio = parse_double("physics.pump_ratio", v); },
        [](const C& c) { return c.pump_ratio ? num(*c.pump_ratio) : std::string(); });
    add("physics.R", "float", "", "mirror reflectivity in (0, 1]", true, true,
        [](C& c, Rg&, S v) { c.sim.params.R = parse_double("physics.R", v); },
        [](const C& c) { return num(c.sim.params.R); });
    add("physics.omega_r", "float", "", "recoil frequency omega_r / Gamma", true, true,
        [](C& c, Rg&, S v) { c.sim.params.omega_r_hat = parse_double("physics.omega_r", v); },
        [](const C& c) { return num(c.sim.params.omega_r_hat); });

    add("grid.points", "int", "1024", "grid size (power of two)", false, true,
        [](C& c, Rg&, S v) { c.sim.n_points = parse_count("grid.points", v); },
        [](const C& c) { return num(c.sim.n_points); });
    add("grid.periods", "int", "8", "number of Lambda_c periods in the domain", false, true,
        [](C& c, Rg&, S v) { c.sim.n_periods = static_cast<int>(parse_count("grid.periods", v)); },
        [](const C& c) { return num(c.sim.n_periods); });

    add("time.dtau", "float", "0.001", "time step in 1/omega_r", false, true,
        [](C& c, Rg&, S v) { c.sim.dtau = parse_double("time.dtau", v); },
        [](const C& c) { return num(c.sim.dtau); });
    add("time.t_end", "float", "200", "run length in 1/omega_r", false, true,
        [](C& c, Rg&, S v) { c.sim.t_end = parse_double("time.t_end", v); },
        [](const C& c) { return num(c.sim.t_end); });
    add("time.snapshot_stride", "int", "0", "steps between field snapshots (0 = none)", false, true,
        [](C& c, Rg&, S v) { c.sim.snapshot_stride = parse_count("time.snapshot_stride", v); },
        [](const C& c) { return num(c.sim.snapshot_stride); });
    add("time.trace_stride", "int", "10", "steps between trace samples", false, true,
        [](C& c, Rg&, S v) { c.sim.trace_stride = parse_count("time.trace_stride", v); },
        [](const C& c) { return num(c.sim.trace_stride); });

    add("initial.kind", "cosine|gaussian|file", "cosine", "initial wavefunction", false, false,
        [](C& c, Rg&, S v) {
          if (v == "cosine") c.sim.initial.kind = InitialKind::cosine;
          else if (v == "gaussian") c.sim.initial.kind = InitialKind::gaussian;
          else if (v == "file") c.sim.initial.kind = InitialKind::file;
          else type_error("initial.kind", v, "one of cosine, gaussian, file");
        },
        [](const C& c) {
          switch (c.sim.initial.kind) {
            case InitialKind::cosine: return std::string("cosine");
            case InitialKind::gaussian: return std::string("gaussian");
            case InitialKind::file: return std::string("file");
          }
          return std::string();
        });
    add("initial.amplitude", "float", "0.001", "cosine seed a0 in psi = 1 + a0 cos(theta)", false,
        true, [](C& c, Rg&, S v) { c.sim.initial.amplitude = parse_double("initial.amplitude", v); },
        [](const C& c) { return num(c.sim.initial.amplitude); });
    add("initial.noise", "float", "0", "RMS of seeded multimode noise", false, true,
        [](C& c, Rg&, S v) { c.sim.initial.noise_rms = parse_double("initial.noise", v); },
        [](const C& c) { return num(c.sim.initial.noise_rms); });
    add("initial.growing_mode", "bool", "false", "seed along the unstable eigenvector", false, false,
        [](C& c, Rg&, S v) { c.sim.initial.growing_mode = parse_bool("initial.growing_mode", v); },
        [](const C& c) { return std::string(c.sim.initial.growing_mode ? "true" : "false"); });
    add("initial.width", "float", "0.07", "gaussian width sigma_x / Lambda_c", false, true,
        [](C& c, Rg&, S v) { c.sim.initial.width = parse_double("initial.width", v); },
        [](const C& c) { return num(c.sim.initial.width); });
    add("initial.center", "float", "0.5", "gaussian centre as a fraction of the domain", false, true,
        [](C& c, Rg&, S v) { c.sim.initial.center = parse_double("initial.center", v); },
        [](const C& c) { return num(c.sim.initial.center); });
    add("initial.path", "string", "", "snapshot file for initial.kind = file", false, false,
        [](C& c, Rg&, S v) { c.sim.initial.path = v; },
        [](const C& c) { return c.sim.initial.path; });

    add("run.seed", "int", "1", "RNG seed", false, true,
        [](C& c, Rg&, S v) { c.sim.seed = parse_count("run.seed", v); },
        [](const C& c) { return num(c.sim.seed); });
    add("run.output", "string", "run", "output directory", false, false,
        [](C& c, Rg&, S v) { c.output_dir = v; }, [](const C& c) { return c.output_dir; });
    add("run.workers", "int", "1", "worker threads for sweeps and scans", false, true,
        [](C& c, Rg&, S v) { c.workers = parse_count("run.workers", v); },
        [](const C& c) { return num(c.workers); });

    add("sweep.key", "string", "", "config key to sweep, e.g. physics.pump_ratio", false, false,
        [](C& c, Rg&, S v) { c.sweep.key = v; }, [](const C& c) { return c.sweep.key; });
    add("sweep.values", "list", "", "comma-separated values (or start/stop/count)", false, false,
        [](C& c, Rg&, S v) { c.sweep.values = parse_list("sweep.values", v); },
        [](const C& c) { return format_list(c.sweep.values); });
    add("sweep.start", "float", "", "first value of a generated range", false, false,
        [](C&, Rg& r, S v) { r.start = parse_double("sweep.start", v); }, nullptr);
    add("sweep.stop", "float", "", "last value of a generated range", false, false,
        [](C&, Rg& r, S v) { r.stop = parse_double("sweep.stop", v); }, nullptr);
    add("sweep.count", "int", "", "number of generated values", false, false,
        [](C&, Rg& r, S v) { r.count = parse_count("sweep.count", v); }, nullptr);
    add("sweep.spacing", "log|linear", "log", "spacing of generated values", false, false,
        [](C&, Rg& r, S v) {
          if (v == "log") r.log_spacing = true;
          else if (v == "linear") r.log_spacing = false;
          else type_error("sweep.spacing", v, "log or linear");
        },
        nullptr);
    add("sweep.observable", "m_max|growth_rate|droplet_width", "m_max", "per-row observable", false,
        false,
        [](C& c, Rg&, S v) {
          if (v == "m_max") c.sweep.observable = SweepObservable::m_max;
          else if (v == "growth_rate") c.sweep.observable = SweepObservable::growth_rate;
          else if (v == "droplet_width") c.sweep.observable = SweepObservable::droplet_width;
          else type_error("sweep.observable", v, "one of m_max, growth_rate, droplet_width");
        },
        [](const C& c) { return std::string(to_string(c.sweep.observable)); });
    add("sweep.seed_policy", "fixed|per_row", "per_row", "row seeds: shared or base + row index",
        false, false,
        [](C& c, Rg&, S v) {
          if (v == "fixed") c.sweep.seed_policy = SeedPolicy::fixed;
          else if (v == "per_row") c.sweep.seed_policy = SeedPolicy::per_row;
          else type_error("sweep.seed_policy", v, "fixed or per_row");
        },
        [](const C& c) { return std::string(to_string(c.sweep.seed_policy)); });

    add("droplet.discard_fraction", "float", "0.2", "leading run fraction ignored by width fits",
        false, true,
        [](C& c, Rg&, S v) { c.droplet.discard_fraction = parse_double("droplet.discard_fraction", v); },
        [](const C& c) { return num(c.droplet.discard_fraction); });
    add("droplet.fixed_initial_width", "bool", "false",
        "start scans at initial.width instead of the closed-form width", false, false,
        [](C& c, Rg&, S v) {
          c.droplet.fixed_initial_width = parse_bool("droplet.fixed_initial_width", v);
        },
        [](const C& c) { return std::string(c.droplet.fixed_initial_width ? "true" : "false"); });
    add("droplet.validity_threshold", "float", "0.1", "chi0 * n_peak above this flags a row",
        false, true,
        [](C& c, Rg&, S v) {
          c.droplet.validity_threshold = parse_double("droplet.validity_threshold", v);
        },
        [](const C& c) { return num(c.droplet.validity_threshold); });
    return s;
  }();
  return specs;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& spec : registry())
    if (spec.info.key == key) return &spec;
  return nullptr;
}

RealVec generate_range(const SweepRange& r) {
  if (!r.start || !r.stop || r.count == 0)
    throw ConfigError("sweep range needs sweep.start, sweep.stop and sweep.count");
  RealVec out(r.count);
  if (r.count == 1) {
    out[0] = *r.start;
    return out;
  }
  if (r.log_spacing && (*r.start <= 0.0 || *r.stop <= 0.0))
    throw ConfigError("log-spaced sweep needs positive start and stop");
  for (std::size_t i = 0; i < r.count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(r.count - 1);
    out[i] = r.log_spacing ? std::exp(std::log(*r.start) + f * (std::log(*r.stop) - std::log(*r.start)))
                           : *r.start + f * (*r.stop - *r.start);
  }
  return out;
}

void set_with(RunConfig& config, SweepRange& range, const std::string& key,
              const std::string& value, Provenance provenance) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown key '" + key + "'");
  spec->set(config, range, value);
  config.provenance[key] = provenance;
  if (key == "physics.p0") config.provenance.erase("physics.pump_ratio");
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> out;
    for (const auto& spec : registry()) out.push_back(spec.info);
    return out;
  }();
  return keys;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  SweepRange range;
  std::map<std::string, int> seen_at;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any [section]");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!find_key(key))
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (auto it = seen_at.find(key); it != seen_at.end())
      throw ConfigError("duplicate key '" + key + "' on lines " + std::to_string(it->second) +
                        " and " + std::to_string(line_no));
    seen_at[key] = line_no;
    set_with(config, range, key, value, Provenance{Origin::file, line_no});
  }

  std::vector<std::string> missing;
  for (const auto& spec : registry())
    if (spec.required && !seen_at.count(spec.info.key)) missing.push_back(spec.info.key);
  if (!seen_at.count("physics.p0") && !seen_at.count("physics.pump_ratio"))
    missing.push_back("physics.p0 (or physics.pump_ratio)");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& k : missing) msg += " " + k;
    throw ConfigError(msg);
  }
  if (seen_at.count("physics.p0") && seen_at.count("physics.pump_ratio"))
    throw ConfigError("physics.p0 (line " + std::to_string(seen_at["physics.p0"]) +
                      ") and physics.pump_ratio (line " +
                      std::to_string(seen_at["physics.pump_ratio"]) + ") are mutually exclusive");

  const bool has_range = range.start || range.stop || range.count;
  if (has_range && seen_at.count("sweep.values"))
    throw ConfigError("give either sweep.values or sweep.start/stop/count, not both");
  if (has_range) config.sweep.values = generate_range(range);

  for (const auto& spec : registry())
    if (!config.provenance.count(spec.info.key) && spec.get)
      config.provenance[spec.info.key] = Provenance{Origin::default_value, 0};
  if (config.pump_ratio) config.provenance.erase("physics.p0");
  else config.provenance.erase("physics.pump_ratio");
  config.resolve();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void set_value(RunConfig& config, const std::string& key, const std::string& value,
               Provenance provenance) {
  SweepRange range;
  set_with(config, range, key, value, provenance);
  if (range.start || range.stop || range.count)
    throw ConfigError("sweep ranges cannot be overridden; set sweep.values instead");
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  RunConfig next = config;
  set_value(next, key, value, Provenance{Origin::override, 0});
  next.resolve();
  config = std::move(next);
}

std::vector<std::string> RunConfig::resolve() {
  if (pump_ratio) {
    if (!(*pump_ratio > 0.0)) throw ParameterError("physics.pump_ratio must be positive");
    sim.params.p0 = *pump_ratio * compute_pth(sim.params);
  }
  std::vector<std::string> warnings = validate(sim.params);
  if (model != Model::reduced) Grid(sim.n_points, sim.n_periods);
  sim.steps();
  if (sim.trace_stride == 0) throw ConfigError("time.trace_stride must be at least 1");
  if (workers == 0) throw ConfigError("run.workers must be at least 1");
  if (!(droplet.discard_fraction >= 0.0 && droplet.discard_fraction < 1.0))
    throw ConfigError("droplet.discard_fraction must lie in [0, 1)");
  if (!sweep.key.empty()) {
    const KeySpec* spec = find_key(sweep.key);
    if (!spec || !spec->numeric) throw ConfigError("sweep.key '" + sweep.key + "' is not a numeric key");
    if (sweep.values.empty()) throw ConfigError("sweep.key is set but no sweep values are given");
    const bool up = std::is_sorted(sweep.values.begin(), sweep.values.end(), std::less_equal<>());
    const bool down = std::is_sorted(sweep.values.begin(), sweep.values.end(), std::greater_equal<>());
    if (!(up || down) || std::adjacent_find(sweep.values.begin(), sweep.values.end()) != sweep.values.end())
      throw ConfigError("sweep values must be strictly monotone");
  }
  return warnings;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  std::string section;
  for (const auto& spec : registry()) {
    if (!spec.get) continue;
    const auto dot = spec.info.key.find('.');
    const std::string sec = spec.info.key.substr(0, dot);
    const std::string name = spec.info.key.substr(dot + 1);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    const std::string value = spec.get(*this);
    if (spec.info.key == "physics.pump_ratio" && !pump_ratio) continue;
    if (spec.info.key == "physics.p0" && pump_ratio) {
      os << "# p0 = " << value << "  (derived from pump_ratio)\n";
      continue;
    }
    if (value.empty()) continue;
    os << name << " = " << value << '\n';
  }
  return os.str();
}

std::string RunConfig::hash() const {
  // Where and how wide a job runs does not change its results.
  RunConfig job = *this;
  job.output_dir = "run";
  job.workers = 1;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : job.to_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

droplet::ScanOptions RunConfig::scan_options() const {
  droplet::ScanOptions o;
  o.n_points = sim.n_points;
  o.dtau = sim.dtau;
  o.t_end = sim.t_end;
  o.snapshot_stride = sim.snapshot_stride > 0 ? sim.snapshot_stride : 200;
  o.discard_fraction = droplet.discard_fraction;
  o.fixed_initial_width = droplet.fixed_initial_width;
  o.initial_width = sim.initial.width;
  o.validity_threshold = droplet.validity_threshold;
  o.workers = workers;
  return o;
}

}  // namespace optohmf
