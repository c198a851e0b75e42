#include "edlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace edlab {
namespace {

struct Entry {
  std::size_t line = 0;
  std::string key;
  std::string value;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Reads `key = value` lines; duplicates and malformed lines become issues.
std::vector<Entry> read_entries(std::string_view text, std::vector<ConfigIssue>& issues) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "", "expected `key = value`"});
    } else {
      Entry e{line_no, trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1))};
      if (e.key.empty()) {
        issues.push_back({line_no, "", "empty key"});
      } else if (!seen.insert(e.key).second) {
        issues.push_back({line_no, e.key, "duplicate key"});
      } else {
        entries.push_back(std::move(e));
      }
    }
    if (end == text.size()) break;
  }
  return entries;
}

std::optional<double> to_double(const std::string& s) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, x);
  if (r.ec != std::errc() || r.ptr != last || !std::isfinite(x)) return std::nullopt;
  return x;
}

std::optional<std::uint64_t> to_uint(const std::string& s) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Shared cursor over the parsed entries: typed getters record issues
// instead of throwing so one pass reports everything.
class Reader {
 public:
  Reader(std::vector<Entry> entries, std::vector<ConfigIssue>& issues) : issues_(issues) {
    for (auto& e : entries) by_key_.emplace(e.key, std::move(e));
  }

  const Entry* find(const std::string& key) const {
    const auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : &it->second;
  }
  std::size_t line_of(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->line : 0;
  }

  void number(const std::string& key, double& out) {
    if (const Entry* e = find(key)) {
      if (auto v = to_double(e->value)) {
        out = *v;
      } else {
        issue(*e, "unparsable number '" + e->value + "'");
      }
    }
  }
  void count(const std::string& key, std::uint64_t& out) {
    if (const Entry* e = find(key)) {
      if (auto v = to_uint(e->value)) {
        out = *v;
      } else {
        issue(*e, "unparsable integer '" + e->value + "'");
      }
    }
  }
  bool list(const std::string& key, std::vector<double>& out) {
    const Entry* e = find(key);
    if (!e) return false;
    std::vector<double> v;
    for (const auto& item : split(e->value, ',')) {
      auto x = to_double(item);
      if (!x) {
        issue(*e, "unparsable number '" + item + "'");
        return false;
      }
      v.push_back(*x);
    }
    out = std::move(v);
    return true;
  }
  bool rows(const std::string& key, std::vector<std::vector<double>>& out) {
    const Entry* e = find(key);
    if (!e) return false;
    std::vector<std::vector<double>> rows;
    for (const auto& row : split(e->value, ';')) {
      std::vector<double> r;
      for (const auto& item : split(row, ',')) {
        auto x = to_double(item);
        if (!x) {
          issue(*e, "unparsable number '" + item + "'");
          return false;
        }
        r.push_back(*x);
      }
      rows.push_back(std::move(r));
    }
    out = std::move(rows);
    return true;
  }

  void require(const std::string& key) {
    if (!find(key)) issues_.push_back({0, key, "missing required key"});
  }
  void reject_unknown(const std::set<std::string>& allowed, const std::string& context) {
    for (const auto& [key, e] : by_key_) {
      if (!allowed.count(key)) issue(e, "unknown key" + context);
    }
  }
  void issue(const Entry& e, std::string message) { issues_.push_back({e.line, e.key, std::move(message)}); }
  void issue_at(const std::string& key, std::string message) {
    issues_.push_back({line_of(key), key, std::move(message)});
  }

 private:
  std::map<std::string, Entry> by_key_;
  std::vector<ConfigIssue>& issues_;
};

const std::vector<std::string> kCommonKeys{"scenario", "hbar",     "mass",  "eta",      "grid_min",
                                           "grid_max", "grid_points", "times", "seed",  "output_dir",
                                           "plots",    "particles", "dt",    "threads"};
const std::vector<std::string> kWeightKeys{"weights_re1", "weights_im1", "weights_re2", "weights_im2"};

std::set<std::string> allowed_keys(ScenarioKind k) {
  std::set<std::string> s(kCommonKeys.begin(), kCommonKeys.end());
  switch (k) {
    case ScenarioKind::FreePacket:
      s.insert("sigma0");
      break;
    case ScenarioKind::DoubleSlit:
      s.insert({"sigma0", "l"});
      s.insert(kWeightKeys.begin(), kWeightKeys.end());
      break;
    default:
      s.insert("omega");
      break;
  }
  return s;
}

std::vector<double> default_times(ScenarioKind k) {
  const std::vector<double> eighths{0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
  switch (k) {
    case ScenarioKind::FreePacket:
      return {0.0, 1.0, 2.0};
    case ScenarioKind::DoubleSlit:
      return {0.0, 1.0, 6.0, 12.0};
    case ScenarioKind::Ho2dRotating:
      return {0.0, 0.25, 0.5};
    default:
      return eighths;
  }
}

void throw_if_any(std::vector<ConfigIssue>& issues) {
  if (issues.empty()) return;
  std::stable_sort(issues.begin(), issues.end(),
                   [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  throw ConfigParseError(std::move(issues));
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"free_packet", "double_slit", "ho_1d", "ho_2d_rotating",
                                              "ho_2d_breathing"};
  return names;
}

std::string scenario_name(ScenarioKind kind) { return scenario_names()[static_cast<std::size_t>(kind)]; }

int ScenarioConfig::dim() const {
  return scenario == ScenarioKind::Ho2dRotating || scenario == ScenarioKind::Ho2dBreathing ? 2 : 1;
}

double ScenarioConfig::time_unit() const {
  switch (scenario) {
    case ScenarioKind::FreePacket:
    case ScenarioKind::DoubleSlit:
      return characteristic_time(sigma0, units);
    case ScenarioKind::Ho2dBreathing:
      return std::numbers::pi / omega;
    default:
      return 2.0 * std::numbers::pi / omega;
  }
}

ConfigParseError::ConfigParseError(std::vector<ConfigIssue> issues)
    : ConfigurationError([&] {
        std::ostringstream os;
        for (std::size_t i = 0; i < issues.size(); ++i) {
          if (i) os << '\n';
          if (issues[i].line) os << "line " << issues[i].line << ": ";
          if (!issues[i].key.empty()) os << issues[i].key << ": ";
          os << issues[i].message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

ScenarioConfig parse_config(std::string_view text) {
  std::vector<ConfigIssue> issues;
  Reader r(read_entries(text, issues), issues);
  ScenarioConfig c;

  r.require("scenario");
  bool known_scenario = false;
  if (const Entry* e = r.find("scenario")) {
    const auto& names = scenario_names();
    const auto it = std::find(names.begin(), names.end(), e->value);
    if (it == names.end()) {
      r.issue(*e, "invalid scenario '" + e->value + "'");
    } else {
      c.scenario = static_cast<ScenarioKind>(it - names.begin());
      known_scenario = true;
    }
  }
  if (known_scenario) r.reject_unknown(allowed_keys(c.scenario), " for scenario " + scenario_name(c.scenario));

  r.number("hbar", c.units.hbar);
  r.number("mass", c.units.mass);
  r.number("eta", c.units.eta);
  if (!(c.units.hbar > 0.0 && c.units.mass > 0.0 && c.units.eta > 0.0)) {
    issues.push_back({0, "units", "hbar, mass and eta must be positive"});
  }
  r.number("sigma0", c.sigma0);
  if (!(c.sigma0 > 0.0)) r.issue_at("sigma0", "must be positive");
  r.number("l", c.l);
  if (!(c.l > 0.0)) r.issue_at("l", "must be positive");
  r.number("omega", c.omega);
  if (!(c.omega > 0.0)) r.issue_at("omega", "must be positive");

  double w[4] = {c.w1.real(), c.w1.imag(), c.w2.real(), c.w2.imag()};
  for (int i = 0; i < 4; ++i) r.number(kWeightKeys[i], w[i]);
  c.w1 = {w[0], w[1]};
  c.w2 = {w[2], w[3]};
  if (std::abs(std::norm(c.w1) + std::norm(c.w2) - 1.0) > 1e-9) {
    issues.push_back({r.line_of("weights_re1"), "weights", "|w1|^2 + |w2|^2 must equal 1"});
  }

  // Grid defaults scale with the natural length of the scenario.
  const bool positive_scales = c.sigma0 > 0.0 && c.omega > 0.0 && c.units.hbar > 0.0 && c.units.mass > 0.0;
  const double scale = c.scenario == ScenarioKind::FreePacket || c.scenario == ScenarioKind::DoubleSlit || !positive_scales
                           ? c.sigma0
                           : std::sqrt(c.units.hbar / (c.units.mass * c.omega));
  c.grid = c.dim() == 2 ? default_grid_2d(scale) : default_grid_1d(scale);
  double gmin = c.grid.extents[0].min, gmax = c.grid.extents[0].max;
  std::uint64_t gpoints = c.grid.points[0];
  r.number("grid_min", gmin);
  r.number("grid_max", gmax);
  r.count("grid_points", gpoints);
  bool grid_ok = true;
  if (!(gmin < gmax)) {
    r.issue_at("grid_max", "grid_max must exceed grid_min");
    grid_ok = false;
  }
  if (gpoints < 16 || gpoints > 1u << 20) {
    r.issue_at("grid_points", "points per axis must lie in [16, 2^20]");
    grid_ok = false;
  }
  if (grid_ok) c.grid = c.dim() == 2 ? GridSpec::square(gmin, gmax, gpoints) : GridSpec::line(gmin, gmax, gpoints);

  c.times = default_times(c.scenario);
  if (r.list("times", c.times)) {
    bool ok = !c.times.empty();
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      if (c.times[i] < 0.0 || (i > 0 && !(c.times[i] > c.times[i - 1]))) ok = false;
    }
    if (!ok) r.issue_at("times", "times must be non-negative and strictly increasing");
  }

  r.count("seed", c.seed);
  if (const Entry* e = r.find("output_dir")) {
    if (e->value.empty()) {
      r.issue(*e, "empty path");
    } else {
      c.output_dir = e->value;
    }
  }
  if (const Entry* e = r.find("plots")) {
    if (e->value == "true") {
      c.plots = true;
    } else if (e->value == "false") {
      c.plots = false;
    } else {
      r.issue(*e, "invalid value '" + e->value + "', expected true or false");
    }
  }

  std::uint64_t particles = c.particles, threads = c.threads;
  r.count("particles", particles);
  r.count("threads", threads);
  if (particles == 0) r.issue_at("particles", "must be positive");
  if (threads == 0 || threads > 256) r.issue_at("threads", "must lie in [1, 256]");
  c.particles = particles;
  c.threads = threads;
  c.dt = positive_scales ? 1e-3 * c.time_unit() : 1.0;
  r.number("dt", c.dt);
  if (!(c.dt > 0.0)) r.issue_at("dt", "must be positive");

  throw_if_any(issues);
  return c;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string emit_config(const ScenarioConfig& c) {
  std::ostringstream os;
  const auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  kv("scenario", scenario_name(c.scenario));
  kv("hbar", fmt(c.units.hbar));
  kv("mass", fmt(c.units.mass));
  kv("eta", fmt(c.units.eta));
  switch (c.scenario) {
    case ScenarioKind::FreePacket:
      kv("sigma0", fmt(c.sigma0));
      break;
    case ScenarioKind::DoubleSlit:
      kv("sigma0", fmt(c.sigma0));
      kv("l", fmt(c.l));
      kv("weights_re1", fmt(c.w1.real()));
      kv("weights_im1", fmt(c.w1.imag()));
      kv("weights_re2", fmt(c.w2.real()));
      kv("weights_im2", fmt(c.w2.imag()));
      break;
    default:
      kv("omega", fmt(c.omega));
      break;
  }
  kv("grid_min", fmt(c.grid.extents[0].min));
  kv("grid_max", fmt(c.grid.extents[0].max));
  kv("grid_points", std::to_string(c.grid.points[0]));
  std::string times;
  for (std::size_t i = 0; i < c.times.size(); ++i) times += (i ? ", " : "") + fmt(c.times[i]);
  kv("times", times);
  kv("seed", std::to_string(c.seed));
  kv("output_dir", c.output_dir);
  kv("plots", c.plots ? "true" : "false");
  kv("particles", std::to_string(c.particles));
  kv("dt", fmt(c.dt));
  kv("threads", std::to_string(c.threads));
  return os.str();
}

SnapshotSet run_scenario(const ScenarioConfig& c) {
  switch (c.scenario) {
    case ScenarioKind::FreePacket:
      return run_free_packet(c.sigma0, c.units, c.times, c.grid);
    case ScenarioKind::DoubleSlit: {
      SlitConfig slits;
      slits.l = c.l;
      slits.sigma0 = c.sigma0;
      slits.w1 = c.w1;
      slits.w2 = c.w2;
      if (slits.equal_real()) return run_double_slit(slits, c.units, c.times, c.grid);
      const double a2 = std::norm(c.w1);
      const bool real_positive = c.w1.imag() == 0.0 && c.w2.imag() == 0.0 && c.w1.real() > 0.0 && c.w2.real() > 0.0;
      if (real_positive && (a2 < 0.01 || a2 > 0.99)) {
        return run_double_slit_extreme(a2, slits, c.units, c.times, c.grid);
      }
      return run_double_slit_unequal(slits, c.units, c.times, c.grid);
    }
    case ScenarioKind::Ho1d:
      return run_ho_1d(c.omega, c.units, c.times, c.grid);
    case ScenarioKind::Ho2dRotating:
      return run_ho_2d_rotating(c.omega, c.units, c.times, c.grid);
    case ScenarioKind::Ho2dBreathing:
      return run_ho_2d_breathing(c.omega, c.units, c.times, c.grid);
  }
  throw DomainError("unknown scenario");
}

AnalyticState scenario_state(const ScenarioConfig& c) {
  switch (c.scenario) {
    case ScenarioKind::FreePacket:
      return free_gaussian(c.sigma0, c.units);
    case ScenarioKind::DoubleSlit: {
      SlitConfig slits;
      slits.l = c.l;
      slits.sigma0 = c.sigma0;
      slits.w1 = c.w1;
      slits.w2 = c.w2;
      return double_slit_state(slits, c.units);
    }
    case ScenarioKind::Ho1d:
      return ho_superposition_1d(c.omega, c.units);
    case ScenarioKind::Ho2dRotating:
      return rotating_state(c.omega, c.units);
    case ScenarioKind::Ho2dBreathing:
      return breathing_state(c.omega, c.units);
  }
  throw DomainError("unknown scenario");
}

BayesConfig parse_bayes_config(std::string_view text) {
  std::vector<ConfigIssue> issues;
  Reader r(read_entries(text, issues), issues);
  r.reject_unknown({"prior", "likelihood", "observed"}, " for bayes");
  BayesConfig c;
  for (const char* k : {"prior", "likelihood", "observed"}) r.require(k);
  r.list("prior", c.prior);
  r.rows("likelihood", c.likelihood);
  std::uint64_t observed = 0;
  r.count("observed", observed);
  c.observed = observed;
  for (const auto& row : c.likelihood) {
    if (!c.prior.empty() && row.size() != c.prior.size()) {
      r.issue_at("likelihood", "each row needs one entry per prior weight");
      break;
    }
  }
  if (!c.likelihood.empty() && c.observed >= c.likelihood.size()) {
    r.issue_at("observed", "index beyond the likelihood rows");
  }
  throw_if_any(issues);
  return c;
}

MaxEntConfig parse_maxent_config(std::string_view text) {
  std::vector<ConfigIssue> issues;
  Reader r(read_entries(text, issues), issues);
  r.reject_unknown({"prior", "features", "targets"}, " for maxent");
  MaxEntConfig c;
  r.require("features");
  r.require("targets");
  r.list("prior", c.prior);
  r.rows("features", c.features);
  r.list("targets", c.targets);
  if (!c.features.empty()) {
    const std::size_t n = c.features.front().size();
    for (const auto& row : c.features) {
      if (row.size() != n) {
        r.issue_at("features", "rows differ in length");
        break;
      }
    }
    if (!c.prior.empty() && c.prior.size() != n) r.issue_at("prior", "length differs from the feature rows");
    if (r.find("targets") && c.targets.size() != c.features.size()) {
      r.issue_at("targets", "one target per feature row");
    }
  }
  throw_if_any(issues);
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace edlab
