#include "edlab/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <system_error>

#include "edlab/plot.hpp"
#include "edlab/sampler.hpp"
#include "edlab/stats.hpp"

namespace edlab {
namespace fs = std::filesystem;

namespace {

fs::path prepare(const ScenarioConfig& c, const std::optional<fs::path>& dir) {
  const fs::path out = dir ? *dir : fs::path(c.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  fs::remove(out / "manifest.json", ec);
  if (ec) throw IoError("cannot remove stale " + (out / "manifest.json").string() + ": " + ec.message());
  return out;
}

std::string indexed(const std::string& stem, std::size_t k, const char* ext) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem.c_str(), k, ext);
  return buf;
}

std::string g6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void finish(RunOutcome& r, RunManifest& m, std::chrono::steady_clock::time_point start) {
  r.passed = true;
  for (const auto& c : r.checks) r.passed = r.passed && c.passed;
  m.files = r.files;
  m.checks = r.checks;
  m.report = r.report;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(r.dir, m);
}

}  // namespace

RunOutcome execute_run(const ScenarioConfig& c, const std::optional<fs::path>& dir) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome r;
  r.dir = prepare(c, dir);
  const SnapshotSet set = run_scenario(c);
  r.files = write_snapshots(set, r.dir);
  if (c.plots) {
    for (std::size_t k = 0; k < set.snapshots.size(); ++k) {
      PlotStyle style;
      style.title = set.scenario + "   t = " + g6(set.snapshots[k].label) + " " + set.time_unit;
      r.files.push_back(write_file(r.dir, indexed(set.scenario, k, "svg"), render_plot(set.snapshots[k], style)));
    }
  }
  r.checks = set.checks;
  r.report = set.report;
  RunManifest m{"run", emit_config(c), set.scenario, {}, {}, {}, 0.0};
  finish(r, m, start);
  return r;
}

RunOutcome execute_sample(const ScenarioConfig& c, const std::optional<fs::path>& dir) {
  const auto start = std::chrono::steady_clock::now();
  const AnalyticState state = scenario_state(c);
  const double unit = c.time_unit();
  SampleOptions o;
  o.particles = c.particles;
  o.dt = c.dt;
  o.seed = c.seed;
  o.threads = c.threads;
  for (double label : c.times) {
    const auto step = static_cast<std::size_t>(std::llround(label * unit / c.dt));
    if (!o.record_steps.empty() && step <= o.record_steps.back()) {
      throw ConfigurationError("sample: times " + g6(label) + " and its predecessor fall on the same step of dt");
    }
    o.record_steps.push_back(step);
  }
  o.steps = o.record_steps.back();
  if (o.record_steps.size() == 1 && o.steps == 0) o.record_steps = {0};

  RunOutcome r;
  r.dir = prepare(c, dir);
  const TrajectoryEnsemble e = sample_trajectories(DriftSource::analytic(state), o);
  const std::string stem = scenario_name(c.scenario);
  const int dim = c.dim();

  // Histogram bins share the extents of the output grid at a coarser pitch.
  const std::size_t nb = std::min<std::size_t>(c.grid.points[0], dim == 1 ? 256 : 64);
  const GridSpec bins = dim == 1 ? GridSpec::line(c.grid.extents[0].min, c.grid.extents[0].max, nb)
                                 : GridSpec::square(c.grid.extents[0].min, c.grid.extents[0].max, nb);
  const std::size_t tests = e.times.size() * static_cast<std::size_t>(dim);
  const double level = 0.01 / static_cast<double>(tests);
  for (std::size_t k = 0; k < e.times.size(); ++k) {
    const double t = e.times[k];
    const auto h = histogram(e, bins, k);
    std::string csv = dim == 1 ? "x,density,analytic\n" : "x,y,density,analytic\n";
    char buf[96];
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const Point p = bins.node(i);
      if (dim == 1) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", p[0], h[i], state.density(p, t));
      } else {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e\n", p[0], p[1], h[i], state.density(p, t));
      }
      csv += buf;
    }
    r.files.push_back(write_file(r.dir, indexed(stem + "_hist", k, "csv"), csv));

    // Reference draws from the closed-form density on the support box.
    const auto box = state.support(t);
    const GridSpec fine = dim == 1 ? GridSpec::line(box[0].min, box[0].max, 8001)
                                   : GridSpec::plane(box[0], box[1], 401, 401);
    std::vector<double> rho(fine.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = state.density(fine.node(i), t);
    const auto ref = draw_from_density(fine, rho, c.particles, c.seed ^ (0xA5A5A5A5ULL + k));
    for (int a = 0; a < dim; ++a) {
      std::vector<double> rx;
      rx.reserve(ref.size());
      for (const auto& p : ref) rx.push_back(p[static_cast<std::size_t>(a)]);
      const KsResult ks = ks_two_sample(e.coordinates(k, a), rx);
      const std::string axis = dim == 1 ? "" : (a == 0 ? " x" : " y");
      const std::string key = "ks_p" + std::string(dim == 1 ? "" : (a == 0 ? "_x" : "_y")) + "@" + g6(t / unit);
      r.report.emplace_back(key, ks.p_value);
      r.checks.push_back({"positions match the density" + axis + "@" + g6(t / unit), ks.p_value > level,
                          "D = " + g6(ks.statistic) + ", p = " + g6(ks.p_value) + ", level " + g6(level)});
    }
  }

  std::string traj = dim == 1 ? "particle,time,x\n" : "particle,time,x,y\n";
  const std::size_t shown = std::min<std::size_t>(100, e.particles);
  char buf[96];
  for (std::size_t p = 0; p < shown; ++p) {
    for (std::size_t k = 0; k < e.times.size(); ++k) {
      if (dim == 1) {
        std::snprintf(buf, sizeof buf, "%zu,%.16e,%.16e\n", p, e.times[k], e.position(k, p, 0));
      } else {
        std::snprintf(buf, sizeof buf, "%zu,%.16e,%.16e,%.16e\n", p, e.times[k], e.position(k, p, 0),
                      e.position(k, p, 1));
      }
      traj += buf;
    }
  }
  r.files.push_back(write_file(r.dir, stem + "_trajectories.csv", traj));
  r.report.emplace_back("reflections", static_cast<double>(e.reflections));
  r.report.emplace_back("absorbed", static_cast<double>(e.absorbed));

  RunManifest m{"sample", emit_config(c), stem, {}, {}, {}, 0.0};
  finish(r, m, start);
  return r;
}

}  // namespace edlab
