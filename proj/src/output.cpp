#include "edlab/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "edlab/errors.hpp"
#include "json.hpp"

#ifndef EDLAB_VERSION
#define EDLAB_VERSION "0.0.0"
#endif

namespace edlab {
namespace fs = std::filesystem;

namespace {

void append(std::string& out, double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.16e", x);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string tool_version() { return EDLAB_VERSION; }

std::string snapshot_csv(const Snapshot& s) {
  const VelocityFields& f = s.fields;
  const bool two = f.grid.dim == 2;
  std::string out = two ? "x,y,rho,u_x,u_y,b_x,b_y,v_x,v_y,flux_u_x,flux_u_y,flux_b_x,flux_b_y,flux_v_x,flux_v_y\n"
                        : "x,rho,u,b,v,flux_u,flux_b,flux_v\n";
  const int axes = two ? 2 : 1;
  out.reserve(out.size() + f.grid.size() * (two ? 15 : 8) * 25);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const Point p = f.grid.node(i);
    append(out, p[0]);
    if (two) {
      out += ',';
      append(out, p[1]);
    }
    out += ',';
    append(out, f.rho[i]);
    for (const VectorField* field : {&f.u, &f.b, &f.v, &f.flux_u, &f.flux_b, &f.flux_v}) {
      for (int a = 0; a < axes; ++a) {
        out += ',';
        append(out, (*field)[a][i]);
      }
    }
    out += '\n';
  }
  return out;
}

FileRecord write_file(const fs::path& dir, const std::string& name, std::string_view content) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
  return {name, content.size(), fnv1a64(content)};
}

std::vector<FileRecord> write_snapshots(const SnapshotSet& set, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<FileRecord> files;
  for (std::size_t k = 0; k < set.snapshots.size(); ++k) {
    char name[128];
    std::snprintf(name, sizeof name, "%s_%03zu.csv", set.scenario.c_str(), k);
    files.push_back(write_file(dir, name, snapshot_csv(set.snapshots[k])));
  }
  return files;
}

std::string manifest_json(const RunManifest& m) {
  using json = nlohmann::ordered_json;
  json j;
  j["tool"] = "edlab";
  j["version"] = tool_version();
  j["command"] = m.command;
  j["scenario"] = m.scenario;
  json config = json::object();
  std::istringstream lines(m.config);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) config[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = config;
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", hex64(f.checksum)}});
  j["files"] = files;
  bool all = true;
  json checks = json::array();
  for (const auto& c : m.checks) {
    all = all && c.passed;
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks_passed"] = all;
  j["checks"] = checks;
  json report = json::object();
  for (const auto& [k, v] : m.report) report[k] = std::isfinite(v) ? json(v) : json(nullptr);
  j["report"] = report;
  j["wall_clock_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  write_file(dir, "manifest.json.tmp", manifest_json(m));
  std::error_code ec;
  fs::rename(dir / "manifest.json.tmp", dir / "manifest.json", ec);
  if (ec) throw IoError("cannot finalize " + (dir / "manifest.json").string() + ": " + ec.message());
}

std::vector<std::string> verify_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw IoError("cannot read " + (dir / "manifest.json").string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("files")) throw IoError("malformed manifest in " + dir.string());
  std::vector<std::string> bad;
  for (const auto& f : j["files"]) {
    const std::string name = f.at("name");
    std::ifstream file(dir / name, std::ios::binary);
    if (!file) {
      bad.push_back(name);
      continue;
    }
    std::ostringstream os;
    os << file.rdbuf();
    const std::string bytes = os.str();
    if (bytes.size() != f.at("bytes").get<std::uint64_t>() || hex64(fnv1a64(bytes)) != f.at("fnv1a64")) {
      bad.push_back(name);
    }
  }
  return bad;
}

}  // namespace edlab
