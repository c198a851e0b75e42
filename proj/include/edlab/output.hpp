#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edlab/scenarios.hpp"

namespace edlab {

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);  // 16 lowercase digits

struct FileRecord {
  std::string name;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::uint64_t checksum = 0;
  bool operator==(const FileRecord&) const = default;
};

// Header `x[,y],rho,u…,b…,v…,flux_u…,flux_b…,flux_v…`, one row per node in
// flat grid order, every value as %.16e, LF line endings.
std::string snapshot_csv(const Snapshot& snapshot);

// Writes `content` to dir/name and returns its record. IoError names the path.
FileRecord write_file(const std::filesystem::path& dir, const std::string& name, std::string_view content);

// One `<scenario>_<index>.csv` per snapshot, index zero-padded to 3 digits.
std::vector<FileRecord> write_snapshots(const SnapshotSet& set, const std::filesystem::path& dir);

struct RunManifest {
  std::string command;  // "run" or "sample"
  std::string config;   // canonical config text
  std::string scenario;
  std::vector<FileRecord> files;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> report;
  double wall_seconds = 0.0;
};

std::string tool_version();

// Pretty-printed JSON with keys in a fixed order; non-finite report values
// become null.
std::string manifest_json(const RunManifest& manifest);
// Written through a temporary file and renamed, so a manifest.json that
// exists always belongs to a finished run.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

// Recomputes every listed file's length and checksum; returns the names
// that are missing or differ.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace edlab
