#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "optohmf/config.hpp"
#include "optohmf/droplet.hpp"
#include "optohmf/reduced.hpp"
#include "optohmf/simulation.hpp"
#include "optohmf/sweep.hpp"

namespace optohmf::io {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::uint32_t kCsvSchemaVersion = 1;
inline constexpr std::uint32_t kManifestVersion = 1;
inline constexpr char kSnapshotMagic[8] = {'O', 'H', 'M', 'F', 'S', 'N', 'A', 'P'};

/// Header record of a snapshot file. The on-disk layout is
///   8 bytes magic "OHMFSNAP" | u32 version | u32 header length H |
///   H bytes of UTF-8 JSON header | n_points pairs of little-endian f64 (re, im).
struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::string model;
  std::string field;  ///< "psi" or "intensity"
  std::size_t n_points = 0;
  int n_periods = 1;
  double tau = 0.0;
  std::size_t step = 0;
  std::string config_hash;
};

struct SnapshotFile {
  SnapshotHeader header;
  ComplexVec values;
};

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    std::span<const Complex> values);
void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    std::span<const double> values);
SnapshotFile read_snapshot(const std::filesystem::path& path);

/// Trace CSV: `#` provenance lines, then header
/// tau,M,n1_re,n1_im,n2_abs,phi2_abs,norm_error,energy
void write_trace_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                     const RunConfig& config);

struct TraceTable {
  RealVec tau, m, n1_re, n1_im, n2_abs, phi2_abs, norm_error, energy;
  MagnetizationTrace magnetization() const;
};
TraceTable read_trace_csv(const std::filesystem::path& path);

/// tau,S_R,S_I,D,M,M_abs,M_analytic,norm_residual,drive_residual
void write_reduced_csv(const std::filesystem::path& path, const reduced::Trajectory& trajectory,
                       double drive, const RunConfig& config);

/// p0,drive,sigma_fit,sigma_closed,residual,width_variation,width_spread,chi0_n_peak,
/// mapping_warning,regime_warning,error
void write_scan_csv(const std::filesystem::path& path, const std::vector<droplet::ScanRow>& rows,
                    const RunConfig& config);

/// value,p0,drive,observable,aux,max_norm_error,seed,error
void write_sweep_csv(const std::filesystem::path& path, const sweep::Table& table,
                     const RunConfig& config);

/// manifest.json: versions, command, config hash, full resolved config text,
/// per-key provenance, output file list.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const RunConfig& config, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings);

/// Reconstructs the RunConfig stored in a manifest.
RunConfig read_manifest(const std::filesystem::path& path);

std::string artifact_version();

}  // namespace optohmf::io
