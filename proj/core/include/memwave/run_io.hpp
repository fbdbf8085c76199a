#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "memwave/diagnostics.hpp"
#include "memwave/solver.hpp"
#include "memwave/trace.hpp"

namespace memwave {

constexpr const char* kToolVersion = "0.1.0";

/// Formats a double with 17 significant digits (CSV convention).
std::string csv_number(double v);

/// SHA-256 hex digest of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Creates a fresh, uniquely named run directory under `root`.
std::filesystem::path create_run_directory(const std::filesystem::path& root,
                                           const std::string& prefix = "run");

/// energy.csv: t, kinetic, pot_simple, pot_history, history_term, G_int,
/// E_simple, E_history, memory_dissipation.
void write_energy_csv(const std::filesystem::path& path, const EnergyReport& report);

/// trace.csv: t, node, raw, convolved.
void write_trace_csv(const std::filesystem::path& path, const TraceSeries& trace);

/// Flat binary snapshot records: header (magic, dims, dt, cadence, record
/// count) followed by per-record time, u and u_t payloads as little-endian
/// 64-bit floats, row-major.
void write_snapshots_binary(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_snapshots_binary(const std::filesystem::path& path);

/// CSV mirror of the snapshots (small runs only).
void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj);

struct ManifestEntry {
    std::string name;
    std::uint64_t size = 0;
    std::string sha256;
};

/// Writes manifest.json (sealed last): tool version, timestamps, config
/// echo, file inventory with digests, and the summary metrics blob.
void write_manifest(const std::filesystem::path& dir, const std::string& config_text,
                    const std::string& started_utc, const std::string& summary_json);

/// True iff every file listed in the directory's manifest exists and
/// matches its recorded digest.
bool verify_manifest(const std::filesystem::path& dir, std::string* first_mismatch = nullptr);

std::string utc_timestamp();

} // namespace memwave
