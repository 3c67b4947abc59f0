#include "optohmf/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "optohmf/error.hpp"

namespace optohmf::io {

using nlohmann::json;

#ifndef OPTOHMF_VERSION
#define OPTOHMF_VERSION "0.0.0"
#endif

std::string artifact_version() { return OPTOHMF_VERSION; }

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated snapshot header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_header_json(std::ostream& out, const SnapshotHeader& h) {
  const json header = {
      {"model", h.model},         {"field", h.field}, {"n_points", h.n_points},
      {"n_periods", h.n_periods}, {"tau", h.tau},     {"step", h.step},
      {"config_hash", h.config_hash},
  };
  const std::string text = header.dump();
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put_u32(out, h.version);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void provenance_lines(std::ostream& out, const char* kind, const RunConfig& config) {
  out << "# optohmf " << kind << " csv v" << kCsvSchemaVersion << '\n';
  out << "# artifact_version: " << artifact_version() << '\n';
  out << "# config_hash: " << config.hash() << '\n';
  out << "# model: " << to_string(config.model) << '\n';
}

std::string f(double v) { return format_double(v); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    std::span<const Complex> values) {
  if (values.size() != header.n_points) throw IoError("snapshot header size does not match data");
  std::ofstream out = open_out(path, true);
  write_header_json(out, header);
  for (const auto& v : values) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    std::span<const double> values) {
  ComplexVec c(values.begin(), values.end());
  write_snapshot(path, header, c);
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path.string() + "'");
  char magic[sizeof kSnapshotMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
    throw IoError("'" + path.string() + "' is not a snapshot file (bad magic)");
  SnapshotFile file;
  file.header.version = get_u32(in);
  if (file.header.version != kSnapshotVersion)
    throw IoError("unsupported snapshot version " + std::to_string(file.header.version));
  const std::uint32_t length = get_u32(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), length)) throw IoError("truncated snapshot header");
  try {
    const json h = json::parse(text);
    file.header.model = h.at("model").get<std::string>();
    file.header.field = h.at("field").get<std::string>();
    file.header.n_points = h.at("n_points").get<std::size_t>();
    file.header.n_periods = h.at("n_periods").get<int>();
    file.header.tau = h.at("tau").get<double>();
    file.header.step = h.at("step").get<std::size_t>();
    file.header.config_hash = h.at("config_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError("malformed snapshot header: " + std::string(e.what()));
  }
  std::vector<unsigned char> payload(file.header.n_points * 16);
  if (!in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size())))
    throw IoError("truncated snapshot payload");
  file.values.resize(file.header.n_points);
  for (std::size_t i = 0; i < file.values.size(); ++i)
    file.values[i] = Complex(get_f64(&payload[16 * i]), get_f64(&payload[16 * i + 8]));
  return file;
}

void write_trace_csv(const std::filesystem::path& path, const Trajectory& traj,
                     const RunConfig& config) {
  std::ofstream out = open_out(path);
  provenance_lines(out, "trace", config);
  out << "# units: tau in 1/omega_r; energy in hbar*omega_r (hmf only)\n";
  out << "tau,M,n1_re,n1_im,n2_abs,phi2_abs,norm_error,energy\n";
  const auto& t = traj.trace;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << f(t.times[i]) << ',' << f(t.m[i]) << ',' << f(traj.mode1[i].real()) << ','
        << f(traj.mode1[i].imag()) << ',' << f(t.mode2[i]) << ',' << f(traj.potential_mode2[i])
        << ',' << f(traj.norm_error[i]) << ',' << (traj.energy.empty() ? "" : f(traj.energy[i]))
        << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

MagnetizationTrace TraceTable::magnetization() const {
  MagnetizationTrace trace;
  for (std::size_t i = 0; i < tau.size(); ++i) trace.push(tau[i], m[i], n2_abs[i]);
  return trace;
}

TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path.string() + "'");
  std::string line;
  std::vector<std::string> columns;
  TraceTable table;
  std::map<std::string, RealVec*> slots = {
      {"tau", &table.tau},       {"M", &table.m},           {"n1_re", &table.n1_re},
      {"n1_im", &table.n1_im},   {"n2_abs", &table.n2_abs}, {"phi2_abs", &table.phi2_abs},
      {"norm_error", &table.norm_error}, {"energy", &table.energy},
  };
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (columns.empty()) {
      columns = cells;
      for (const char* required : {"tau", "M", "n2_abs"})
        if (std::find(columns.begin(), columns.end(), required) == columns.end())
          throw IoError("trace csv lacks column '" + std::string(required) + "'");
      continue;
    }
    if (cells.size() != columns.size())
      throw IoError("trace csv line " + std::to_string(line_no) + " has the wrong column count");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto it = slots.find(columns[c]);
      if (it == slots.end()) continue;
      it->second->push_back(cells[c].empty() ? std::nan("") : std::stod(cells[c]));
    }
  }
  if (columns.empty()) throw IoError("trace csv '" + path.string() + "' has no header row");
  return table;
}

void write_reduced_csv(const std::filesystem::path& path, const reduced::Trajectory& traj,
                       double drive, const RunConfig& config) {
  std::ofstream out = open_out(path);
  provenance_lines(out, "reduced", config);
  out << "# drive: " << f(drive) << '\n';
  out << "# units: tau in 1/omega_r\n";
  out << "tau,S_R,S_I,D,M,M_abs,M_analytic,norm_residual,drive_residual\n";
  std::optional<reduced::SechPulse> pulse;
  if (!traj.samples.empty()) {
    try {
      pulse = reduced::make_pulse(drive, traj.samples.front().state.S.real());
    } catch (const DomainError&) {
    }
  }
  const double c1 = traj.samples.empty() ? 1.0 : reduced::norm_invariant(traj.samples.front().state);
  const double c2 =
      traj.samples.empty() ? -1.0 : reduced::drive_invariant(traj.samples.front().state, drive);
  for (const auto& s : traj.samples) {
    out << f(s.tau) << ',' << f(s.state.S.real()) << ',' << f(s.state.S.imag()) << ','
        << f(s.state.D) << ',' << f(s.state.S.real()) << ',' << f(std::abs(s.state.S)) << ','
        << (pulse ? f((*pulse)(s.tau)) : std::string()) << ','
        << f(reduced::norm_invariant(s.state) - c1) << ','
        << f(reduced::drive_invariant(s.state, drive) - c2) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_scan_csv(const std::filesystem::path& path, const std::vector<droplet::ScanRow>& rows,
                    const RunConfig& config) {
  std::ofstream out = open_out(path);
  provenance_lines(out, "droplet-scan", config);
  out << "# units: widths as sigma_x / Lambda_c\n";
  out << "p0,drive,sigma_fit,sigma_closed,residual,width_variation,width_spread,chi0_n_peak,mapping_warning,"
         "regime_warning,error\n";
  for (const auto& r : rows) {
    out << f(r.p0) << ',' << f(r.drive) << ',' << f(r.sigma_fit) << ',' << f(r.sigma_closed) << ','
        << f(r.residual) << ',' << f(r.width_variation) << ',' << f(r.width_spread) << ',' << f(r.chi0_n_peak) << ','
        << (r.mapping_warning ? 1 : 0) << ',' << (r.regime_warning ? 1 : 0) << ','
        << '"' << r.error << '"' << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_sweep_csv(const std::filesystem::path& path, const sweep::Table& table,
                     const RunConfig& config) {
  std::ofstream out = open_out(path);
  provenance_lines(out, "sweep", config);
  out << "# sweep_key: " << table.key << '\n';
  out << "# observable: " << to_string(table.observable) << '\n';
  out << "# seed_policy: " << to_string(config.sweep.seed_policy) << " base_seed "
      << config.sim.seed << '\n';
  out << "value,p0,drive,observable,aux,max_norm_error,seed,error\n";
  for (const auto& r : table.rows) {
    out << f(r.value) << ',' << f(r.p0) << ',' << f(r.drive) << ',' << f(r.observable) << ','
        << f(r.aux) << ',' << f(r.max_norm_error) << ',' << r.seed << ',' << '"' << r.error << '"'
        << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const RunConfig& config, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings) {
  json provenance = json::object();
  for (const auto& [key, p] : config.provenance) {
    json entry = {{"origin", std::string(to_string(p.origin))}};
    if (p.origin == Origin::file) entry["line"] = p.line;
    provenance[key] = entry;
  }
  const DerivedParams derived = compute_drive(config.sim.params);
  const json manifest = {
      {"manifest_version", kManifestVersion},
      {"artifact_version", artifact_version()},
      {"command", command},
      {"model", std::string(to_string(config.model))},
      {"config_hash", config.hash()},
      {"config", config.to_text()},
      {"provenance", provenance},
      {"derived",
       {{"chi0", derived.chi0}, {"p_th", derived.p_th}, {"drive", derived.epsilon_over_omega_r}}},
      {"formats",
       {{"trace_csv", kCsvSchemaVersion},
        {"snapshot", kSnapshotVersion},
        {"time_unit", "1/omega_r"},
        {"snapshot_layout", "magic OHMFSNAP, u32 version, u32 header length, JSON header, "
                            "little-endian f64 (re, im) pairs"}}},
      {"outputs", outputs},
      {"warnings", warnings},
  };
  std::ofstream out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest in '" + dir.string() + "'");
}

RunConfig read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  try {
    const json manifest = json::parse(in);
    const auto version = manifest.at("manifest_version").get<std::uint32_t>();
    if (version != kManifestVersion)
      throw IoError("unsupported manifest version " + std::to_string(version));
    return parse_config(manifest.at("config").get<std::string>());
  } catch (const json::exception& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }
}

}  // namespace optohmf::io
