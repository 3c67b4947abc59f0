#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "optohmf/config.hpp"
#include "optohmf/diagnostics.hpp"
#include "optohmf/droplet.hpp"
#include "optohmf/error.hpp"
#include "optohmf/fit.hpp"
#include "optohmf/io.hpp"
#include "optohmf/reduced.hpp"
#include "optohmf/simulation.hpp"
#include "optohmf/sweep.hpp"

namespace optohmf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
};

struct Loaded {
  RunConfig config;
  std::vector<std::string> warnings;
};

Loaded load(const Invocation& inv) {
  Loaded l;
  const fs::path path(inv.config_path);
  l.config = path.extension() == ".json" ? io::read_manifest(path) : load_config(inv.config_path);
  for (const auto& s : inv.sets) apply_override(l.config, s);
  if (!inv.output.empty()) apply_override(l.config, "run.output=" + inv.output);
  l.warnings = l.config.resolve();
  return l;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json fit_json(const FitResult& fit) {
  return {{"exponent", fit.exponent},
          {"prefactor", fit.prefactor},
          {"r2", fit.r2},
          {"exponent_stderr", fit.exponent_stderr},
          {"residuals", fit.residuals}};
}

json derived_json(const PhysParams& p) {
  const DerivedParams d = compute_drive(p);
  return {{"chi0", d.chi0}, {"p_th", d.p_th}, {"drive", d.epsilon_over_omega_r}};
}

json trace_summary(const MagnetizationTrace& trace, double drive) {
  json s;
  if (trace.size() == 0) return s;
  const auto it = std::max_element(trace.m.begin(), trace.m.end());
  const auto peak = static_cast<std::size_t>(it - trace.m.begin());
  s["m0"] = trace.m.front();
  s["m_max"] = *it;
  s["tau_at_max"] = trace.times[peak];
  s["mode2_max"] = *std::max_element(trace.mode2.begin(), trace.mode2.end());
  json pulses = json::array();
  for (const auto& p : find_pulses(trace)) pulses.push_back({{"tau", p.tau}, {"M", p.value}});
  s["pulses"] = pulses;
  try {
    const GrowthFit g = growth_rate_fit(trace);
    s["growth"] = {{"rate", g.rate},
                   {"residual", g.residual},
                   {"t_begin", g.t_begin},
                   {"t_end", g.t_end},
                   {"points", g.points}};
  } catch (const FitError& e) {
    s["growth"] = {{"error", e.what()}};
  }
  if (drive > 1.0) s["growth"]["predicted"] = std::sqrt(drive - 1.0);
  return s;
}

void write_failure(const fs::path& dir, const Error& e, const RunConfig& config) {
  write_json(dir / "failure.json", {{"category", std::string(to_string(e.category()))},
                                    {"message", e.what()},
                                    {"config_hash", config.hash()},
                                    {"config", config.to_text()}});
}

std::string snapshot_name(const char* field, std::size_t step) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%08zu.bin", field, step);
  return buf;
}

int cmd_reduced(Loaded l, const std::string& command, std::ostream& out) {
  const RunConfig& c = l.config;
  const fs::path dir(c.output_dir);
  const double drive = compute_drive(c.sim.params).epsilon_over_omega_r;
  const double m0 = c.sim.initial.amplitude;
  reduced::State start;
  if (drive > 1.0) {
    start = reduced::homoclinic_state(m0, drive);
  } else {
    start.S = m0;
    start.D = -1.0 + drive * m0 * m0;
  }
  reduced::Trajectory traj = reduced::integrate(start, drive, c.sim.dtau, c.sim.steps());
  if (traj.step_size_warning) l.warnings.push_back("dtau * drive >= 0.1: RK4 step is coarse");

  json summary = {{"model", "reduced"},
                  {"derived", derived_json(c.sim.params)},
                  {"m0", m0},
                  {"max_norm_drift", traj.max_norm_drift},
                  {"max_drive_drift", traj.max_drive_drift}};
  double peak = 0.0, peak_tau = 0.0;
  for (const auto& s : traj.samples)
    if (s.state.S.real() > peak) peak = s.state.S.real(), peak_tau = s.tau;
  summary["m_max"] = peak;
  summary["tau_at_max"] = peak_tau;
  if (drive > 1.0) {
    const reduced::SechPulse pulse = reduced::make_pulse(drive, m0);
    double sup = 0.0;
    for (const auto& s : traj.samples)
      if (s.tau <= 2.0 * pulse.t0) sup = std::max(sup, std::abs(s.state.S.real() - pulse(s.tau)));
    summary["analytic"] = {{"amplitude", pulse.amplitude},
                           {"rate", pulse.rate},
                           {"t0", pulse.t0},
                           {"sup_error_first_pulse", sup}};
  }

  const std::size_t stride = std::max<std::size_t>(1, c.sim.trace_stride);
  reduced::Trajectory thinned = traj;
  thinned.samples.clear();
  for (std::size_t i = 0; i < traj.samples.size(); ++i)
    if (i % stride == 0 || i + 1 == traj.samples.size()) thinned.samples.push_back(traj.samples[i]);
  io::write_reduced_csv(dir / "reduced.csv", thinned, drive, c);
  summary["warnings"] = l.warnings;
  write_json(dir / "summary.json", summary);
  io::write_manifest(dir, command, c, {"reduced.csv", "summary.json"}, l.warnings);
  out << "reduced: drive " << drive << ", M_max " << peak << " at tau " << peak_tau << " -> "
      << dir.string() << '\n';
  return kOk;
}

int cmd_simulate(Loaded l, const std::string& command, std::ostream& out) {
  if (l.config.model == Model::reduced) return cmd_reduced(std::move(l), command, out);
  RunConfig& c = l.config;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  c.sim.keep_snapshots = false;

  std::vector<std::string> outputs;
  const std::string hash = c.hash();
  const std::string model(to_string(c.model));
  auto observer = [&](const Snapshot& snap) {
    io::SnapshotHeader h;
    h.model = model;
    h.n_points = snap.psi.size();
    h.n_periods = c.sim.n_periods;
    h.tau = snap.tau;
    h.step = snap.step;
    h.config_hash = hash;
    h.field = "psi";
    const std::string psi_name = "snapshots/" + snapshot_name("psi", snap.step);
    io::write_snapshot(dir / psi_name, h, std::span<const Complex>(snap.psi));
    h.field = "intensity";
    const std::string s_name = "snapshots/" + snapshot_name("intensity", snap.step);
    io::write_snapshot(dir / s_name, h, std::span<const double>(snap.intensity));
    outputs.push_back(psi_name);
    outputs.push_back(s_name);
  };

  Trajectory traj;
  try {
    traj = evolve(c.model, c.sim, observer);
  } catch (const NumericalError& e) {
    write_failure(dir, e, c);
    outputs.push_back("failure.json");
    io::write_manifest(dir, command, c, outputs, l.warnings);
    throw;
  }
  l.warnings.insert(l.warnings.end(), traj.warnings.begin(), traj.warnings.end());

  const double drive = compute_drive(c.sim.params).epsilon_over_omega_r;
  io::write_trace_csv(dir / "trace.csv", traj, c);
  json summary = trace_summary(traj.trace, drive);
  summary["model"] = model;
  summary["derived"] = derived_json(c.sim.params);
  summary["max_norm_error"] = traj.max_norm_error;
  summary["potential_mode2_max"] =
      traj.potential_mode2.empty()
          ? 0.0
          : *std::max_element(traj.potential_mode2.begin(), traj.potential_mode2.end());
  if (!traj.energy.empty()) {
    double drift = 0.0;
    for (double e : traj.energy) drift = std::max(drift, std::abs(e - traj.energy.front()));
    summary["energy_drift"] = drift;
  }
  summary["warnings"] = l.warnings;
  write_json(dir / "summary.json", summary);
  outputs.insert(outputs.begin(), {"trace.csv", "summary.json"});
  io::write_manifest(dir, command, c, outputs, l.warnings);

  out << model << ": drive " << drive << ", M_max " << summary["m_max"].get<double>() << ", "
      << summary["pulses"].size() << " pulse(s), max norm error " << traj.max_norm_error << " -> "
      << dir.string() << '\n';
  return kOk;
}

RealVec swept_p0(const RunConfig& c) {
  if (c.sweep.key.empty() || c.sweep.values.empty()) return {c.sim.params.p0};
  RealVec p0;
  RealVec values = c.sweep.values;
  std::sort(values.begin(), values.end());
  for (double v : values) {
    RunConfig row = c;
    set_value(row, c.sweep.key, format_double(v), Provenance{Origin::override, 0});
    row.resolve();
    p0.push_back(row.sim.params.p0);
  }
  return p0;
}

int cmd_droplet_scan(Loaded l, const std::string& command, std::ostream& out) {
  const RunConfig& c = l.config;
  const fs::path dir(c.output_dir);
  const RealVec p0 = swept_p0(c);
  const auto rows = droplet::droplet_scan(p0, c.sim.params, c.scan_options());
  io::write_scan_csv(dir / "scan.csv", rows, c);

  RealVec x, y, yc;
  json row_errors = json::array();
  for (const auto& r : rows) {
    if (!r.ok()) {
      row_errors.push_back({{"p0", r.p0}, {"error", r.error}});
      continue;
    }
    x.push_back(r.p0);
    y.push_back(r.sigma_fit);
    yc.push_back(r.sigma_closed);
    if (r.mapping_warning) l.warnings.push_back("p0 " + format_double(r.p0) + ": chi0 * n_peak above validity threshold");
    if (r.regime_warning) l.warnings.push_back("p0 " + format_double(r.p0) + ": drive <= 1, narrow-droplet assumption fails");
  }
  json summary = {{"rows", rows.size()}, {"ok_rows", x.size()}, {"row_errors", row_errors}};
  if (x.empty()) {
    write_json(dir / "summary.json", summary);
    io::write_manifest(dir, command, c, {"scan.csv", "summary.json"}, l.warnings);
    throw NumericalError("every droplet row failed; first error: " + rows.front().error);
  }
  if (x.size() >= 4) {
    summary["fit"] = fit_json(powerlaw_fit(x, y));
    summary["fit_closed_form"] = fit_json(powerlaw_fit(x, yc));
  }
  summary["warnings"] = l.warnings;
  write_json(dir / "summary.json", summary);
  io::write_manifest(dir, command, c, {"scan.csv", "summary.json"}, l.warnings);
  out << "droplet-scan: " << x.size() << '/' << rows.size() << " rows";
  if (summary.contains("fit")) out << ", width exponent " << summary["fit"]["exponent"].get<double>();
  out << " -> " << dir.string() << '\n';
  return kOk;
}

int cmd_sweep(Loaded l, const std::string& command, std::ostream& out) {
  const RunConfig& c = l.config;
  const fs::path dir(c.output_dir);
  const sweep::Table table = sweep::run_sweep(c);
  io::write_sweep_csv(dir / "sweep.csv", table, c);

  json summary = {{"key", table.key},
                  {"observable", std::string(to_string(table.observable))},
                  {"rows", table.rows.size()}};
  json row_errors = json::array();
  for (const auto& r : table.rows)
    if (!r.ok()) row_errors.push_back({{"value", r.value}, {"error", r.error}});
  summary["row_errors"] = row_errors;
  const bool relative = table.observable != SweepObservable::droplet_width;
  try {
    summary["fit"] = fit_json(sweep::fit_table(table, relative));
    summary["fit"]["against"] = relative ? "p0 - p_th" : table.key;
  } catch (const Error& e) {
    summary["fit"] = {{"error", e.what()}};
  }
  summary["warnings"] = l.warnings;
  write_json(dir / "summary.json", summary);
  io::write_manifest(dir, command, c, {"sweep.csv", "summary.json"}, l.warnings);
  out << "sweep: " << table.rows.size() - row_errors.size() << '/' << table.rows.size() << " rows";
  if (summary["fit"].contains("exponent"))
    out << ", exponent " << summary["fit"]["exponent"].get<double>();
  out << " -> " << dir.string() << '\n';
  return kOk;
}

int cmd_analyze(const std::string& run_dir, std::ostream& out) {
  const fs::path dir(run_dir);
  const RunConfig c = io::read_manifest(dir / "manifest.json");
  if (!fs::exists(dir / "trace.csv"))
    throw IoError("'" + dir.string() + "' holds no trace.csv to analyze");
  const io::TraceTable table = io::read_trace_csv(dir / "trace.csv");
  const double drive = compute_drive(c.sim.params).epsilon_over_omega_r;
  json analysis = trace_summary(table.magnetization(), drive);
  analysis["derived"] = derived_json(c.sim.params);

  std::vector<fs::path> snaps;
  if (fs::is_directory(dir / "snapshots"))
    for (const auto& entry : fs::directory_iterator(dir / "snapshots"))
      if (entry.path().filename().string().starts_with("psi_")) snaps.push_back(entry.path());
  std::sort(snaps.begin(), snaps.end());
  if (!snaps.empty()) {
    const io::SnapshotFile snap = io::read_snapshot(snaps.back());
    const Grid grid(snap.header.n_points, snap.header.n_periods);
    json modes = json::object();
    for (int k = 1; k <= 4; ++k)
      modes[std::to_string(k)] = std::abs(mode_amplitude(grid, snap.values, k));
    analysis["final_snapshot"] = {{"file", snaps.back().filename().string()},
                                  {"tau", snap.header.tau},
                                  {"density_modes", modes}};
  }
  write_json(dir / "analysis.json", analysis);
  out << "analyze: M_max " << analysis["m_max"].get<double>();
  if (analysis["growth"].contains("rate"))
    out << ", growth rate " << analysis["growth"]["rate"].get<double>();
  out << ", " << analysis["pulses"].size() << " pulse(s) -> " << (dir / "analysis.json").string()
      << '\n';
  return kOk;
}

std::string key_table() {
  std::ostringstream os;
  os << "Config keys (INI-style file: [section] headers, key = value, # or ; comments;\n"
        "override any key with --set section.key=value):\n";
  for (const auto& k : config_keys()) {
    os << "  " << k.key << " (" << k.type;
    if (!k.default_value.empty()) os << ", default " << k.default_value;
    os << ")\n      " << k.description << '\n';
  }
  os << "\nExit codes: 0 ok, 64 usage, 65 config, 66 parameter, 67 grid, 68 numerical,\n"
        "69 fit, 70 internal, 74 io, 75 domain. Failures print one line to stderr:\n"
        "  error: category=<name> code=<n> message=\"<text>\"\n";
  return os.str();
}

int code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parameter: return kParameter;
    case ErrorCategory::config: return kConfig;
    case ErrorCategory::grid: return kGrid;
    case ErrorCategory::numerical: return kNumerical;
    case ErrorCategory::fit: return kFit;
    case ErrorCategory::io: return kIo;
    case ErrorCategory::domain: return kDomain;
  }
  return kInternal;
}

int report(std::ostream& err, std::string_view category, int code, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  std::string escaped;
  for (char ch : message) {
    if (ch == '"' || ch == '\\') escaped += '\\';
    escaped += ch;
  }
  err << "error: category=" << category << " code=" << code << " message=\"" << escaped << "\"\n";
  return code;
}

}  // namespace

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"optohmf: BEC single-mirror feedback / quantum HMF simulator", "optohmf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::artifact_version());
  const std::string keys = key_table();
  app.footer(keys);

  Invocation inv;
  std::string run_dir;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("config", inv.config_path, "config file, or manifest.json of a previous run")
        ->required();
    sub->add_option("--set", inv.sets, "override one key, e.g. --set physics.p0=2e-9")
        ->allow_extra_args(false);
    sub->add_option("-o,--output", inv.output, "output directory (same as --set run.output=...)");
    sub->footer(keys);
  };
  CLI::App* simulate = app.add_subcommand("simulate", "evolve the smf or hmf model (reduced dispatches to the two-state model)");
  CLI::App* reduced_cmd = app.add_subcommand("reduced", "integrate the two-state reduced model");
  CLI::App* scan = app.add_subcommand("droplet-scan", "droplet width versus pump over sweep.values");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the [sweep] section and fit a power law");
  CLI::App* analyze = app.add_subcommand("analyze", "re-analyze a finished run directory");
  for (CLI::App* sub : {simulate, reduced_cmd, scan, sweep_cmd}) add_run_options(sub);
  analyze->add_option("run_dir", run_dir, "directory holding manifest.json and trace.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report(err, "usage", kUsage, e.what());
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  try {
    if (*analyze) return cmd_analyze(run_dir, out);
    Loaded l = load(inv);
    if (*reduced_cmd) {
      l.config.model = Model::reduced;
      return cmd_reduced(std::move(l), command, out);
    }
    if (*simulate) return cmd_simulate(std::move(l), command, out);
    if (*scan) return cmd_droplet_scan(std::move(l), command, out);
    return cmd_sweep(std::move(l), command, out);
  } catch (const Error& e) {
    return report(err, to_string(e.category()), code_for(e.category()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report(err, "io", kIo, e.what());
  } catch (const std::exception& e) {
    return report(err, "internal", kInternal, e.what());
  }
}

}  // namespace optohmf::cli
