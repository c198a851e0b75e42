#include "edlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "edlab/errors.hpp"

namespace edlab {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// SplitMix64: output k is mix64(origin + k * gamma), so any draw of any
// particle is addressable without shared state.
struct Stream {
  std::uint64_t state;
  explicit Stream(std::uint64_t origin) : state(origin) {}
  std::uint64_t next() { return mix64(state += kGamma); }
  // (0, 1]
  double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
  std::array<double, 2> normals() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(th), r * std::sin(th)};
  }
};

std::uint64_t particle_origin(std::uint64_t chunk_seed, std::size_t local) {
  return mix64(chunk_seed ^ (static_cast<std::uint64_t>(local) * 0xD1B54A32D192ED03ULL));
}

class DensityDrawer {
 public:
  DensityDrawer(const GridSpec& grid, const std::vector<double>& rho) : grid_(grid), rho_(rho) {
    grid.validate();
    if (rho.size() != grid.size()) throw ShapeError("density draw: density size does not match grid");
    for (double r : rho) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("density draw: density must be finite and nonnegative");
    }
    const std::size_t cx = grid.points[0] - 1;
    const std::size_t cy = grid.dim == 2 ? grid.points[1] - 1 : 1;
    cdf_.resize(cx * cy);
    double acc = 0.0;
    for (std::size_t i = 0; i < cx; ++i) {
      for (std::size_t j = 0; j < cy; ++j) {
        double m;
        if (grid.dim == 1) {
          m = 0.5 * (rho[i] + rho[i + 1]);
        } else {
          m = 0.25 * (rho[grid.index(i, j)] + rho[grid.index(i + 1, j)] + rho[grid.index(i, j + 1)] +
                      rho[grid.index(i + 1, j + 1)]);
        }
        acc += m;
        cdf_[i * cy + j] = acc;
      }
    }
    if (!(acc > 0.0)) throw DegenerateFieldError("density draw: zero total mass");
    total_ = acc;
    cy_ = cy;
  }

  Point draw(Stream& s) const {
    const double target = s.uniform() * total_;
    std::size_t c = static_cast<std::size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), target) - cdf_.begin());
    c = std::min(c, cdf_.size() - 1);
    // Skip zero-mass cells that lower_bound can land on at exact ties.
    while (c + 1 < cdf_.size() && cdf_[c] == (c ? cdf_[c - 1] : 0.0)) ++c;
    const std::size_t i = c / cy_;
    const std::size_t j = c % cy_;
    const double hx = grid_.spacing(0);
    if (grid_.dim == 1) {
      // Inverse CDF of the linear density a..b on the cell.
      const double a = rho_[i], b = rho_[i + 1];
      const double u = s.uniform();
      const double den = a + std::sqrt(a * a + u * (b * b - a * a));
      const double frac = den > 0.0 ? u * (a + b) / den : u;
      return {grid_.coord(0, i) + std::min(frac, 1.0) * hx, 0.0};
    }
    const double ux = s.uniform();
    const double uy = s.uniform();
    return {grid_.coord(0, i) + ux * hx, grid_.coord(1, j) + uy * grid_.spacing(1)};
  }

 private:
  GridSpec grid_;
  std::vector<double> rho_;
  std::vector<double> cdf_;
  double total_ = 0.0;
  std::size_t cy_ = 1;
};

// Linear interpolation weights along one axis, clamped to the grid.
struct Bracket {
  std::size_t i;
  double f;
};

Bracket bracket(const GridSpec& g, int axis, double x) {
  const double h = g.spacing(axis);
  const std::size_t n = g.points[axis];
  double s = (x - g.extents[axis].min) / h;
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  std::size_t i = std::min(static_cast<std::size_t>(s), n - 2);
  return {i, std::clamp(s - static_cast<double>(i), 0.0, 1.0)};
}

}  // namespace

struct DriftSource::Impl {
  std::optional<AnalyticState> state;
  UnitsConfig units;
  int dim = 1;
  GridSpec grid;
  std::vector<double> times;
  std::vector<VectorField> b;
  std::vector<std::vector<double>> rho;

  Vec2 frame_drift(std::size_t k, const Point& x) const {
    const auto bx = bracket(grid, 0, x[0]);
    if (dim == 1) {
      return {(1.0 - bx.f) * b[k][0][bx.i] + bx.f * b[k][0][bx.i + 1], 0.0};
    }
    const auto by = bracket(grid, 1, x[1]);
    Vec2 out{0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      const auto& f = b[k][a];
      out[a] = (1.0 - bx.f) * ((1.0 - by.f) * f[grid.index(bx.i, by.i)] + by.f * f[grid.index(bx.i, by.i + 1)]) +
               bx.f * ((1.0 - by.f) * f[grid.index(bx.i + 1, by.i)] + by.f * f[grid.index(bx.i + 1, by.i + 1)]);
    }
    return out;
  }
};

DriftSource DriftSource::analytic(const AnalyticState& state) {
  auto impl = std::make_shared<Impl>();
  impl->state = state;
  impl->units = state.units();
  impl->dim = state.dim();
  return DriftSource(std::move(impl));
}

DriftSource DriftSource::frames(const std::vector<WaveField>& frames, const UnitsConfig& units) {
  if (frames.empty()) throw DomainError("drift source: no frames");
  auto impl = std::make_shared<Impl>();
  impl->units = units;
  impl->grid = frames.front().grid;
  impl->dim = impl->grid.dim;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!(frames[k].grid == impl->grid)) throw ShapeError("drift source: frames use different grids");
    if (k > 0 && !(frames[k].time > frames[k - 1].time)) {
      throw DomainError("drift source: frame times must increase strictly");
    }
    const VelocityFields f = velocities_from_wavefield(frames[k], units);
    impl->times.push_back(frames[k].time);
    impl->b.push_back(f.b);
    impl->rho.push_back(f.rho);
  }
  return DriftSource(std::move(impl));
}

int DriftSource::dim() const { return impl_->dim; }
const UnitsConfig& DriftSource::units() const { return impl_->units; }

Vec2 DriftSource::drift(const Point& x, double t) const {
  const Impl& d = *impl_;
  if (d.state) return d.state->drift(x, t);
  const auto& ts = d.times;
  if (ts.size() == 1 || t <= ts.front()) return d.frame_drift(0, x);
  if (t >= ts.back()) return d.frame_drift(ts.size() - 1, x);
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
  const double f = (t - ts[k]) / (ts[k + 1] - ts[k]);
  const Vec2 a = d.frame_drift(k, x);
  const Vec2 b = d.frame_drift(k + 1, x);
  return {(1.0 - f) * a[0] + f * b[0], (1.0 - f) * a[1] + f * b[1]};
}

std::vector<double> DriftSource::density(const GridSpec& grid, double t) const {
  const Impl& d = *impl_;
  if (d.state) {
    grid.validate();
    if (grid.dim != d.dim) throw ShapeError("drift source: grid dimension does not match state");
    std::vector<double> rho(grid.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = d.state->density(grid.node(i), t);
    return rho;
  }
  if (!(grid == d.grid)) throw ShapeError("drift source: density grid must be the frame grid");
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    if (std::abs(d.times[k] - t) <= 1e-12 * (1.0 + std::abs(t))) return d.rho[k];
  }
  throw DomainError("drift source: no frame at the requested time");
}

GridSpec DriftSource::default_grid(double t, std::size_t points_per_axis, double t_end) const {
  const Impl& d = *impl_;
  if (!d.state) return d.grid;
  auto box = d.state->support(t);
  if (t_end > t) {
    const auto later = d.state->support(t_end);
    for (int a = 0; a < 2; ++a) {
      box[a].min = std::min(box[a].min, later[a].min);
      box[a].max = std::max(box[a].max, later[a].max);
    }
  }
  if (d.dim == 1) return GridSpec::line(box[0].min, box[0].max, points_per_axis);
  return GridSpec::plane(box[0], box[1], points_per_axis, points_per_axis);
}

std::vector<double> TrajectoryEnsemble::coordinates(std::size_t record, int axis) const {
  std::vector<double> out;
  out.reserve(particles);
  for (std::size_t p = 0; p < particles; ++p) {
    const double x = position(record, p, axis);
    if (!std::isnan(x)) out.push_back(x);
  }
  return out;
}

TrajectoryEnsemble sample_trajectories(const DriftSource& source, const SampleOptions& options) {
  const UnitsConfig& units = source.units();
  units.validate();
  if (options.particles == 0) throw ConfigurationError("sampler: particle count must be positive");
  if (!(options.dt > 0.0)) throw ConfigurationError("sampler: dt must be positive");
  const int dim = source.dim();
  const double t_end = options.t0 + static_cast<double>(options.steps) * options.dt;
  const GridSpec box =
      options.start_grid ? *options.start_grid : source.default_grid(options.t0, dim == 1 ? 8192 : 256, t_end);
  box.validate();
  if (box.dim != dim) throw ShapeError("sampler: start grid dimension does not match drift source");

  TrajectoryEnsemble ens;
  ens.dim = dim;
  ens.particles = options.particles;
  ens.dt = options.dt;
  ens.t0 = options.t0;
  ens.seed = options.seed;
  ens.box = box;
  ens.record_steps = options.record_steps.empty() ? std::vector<std::size_t>{0, options.steps} : options.record_steps;
  if (options.steps == 0) ens.record_steps = {0};
  for (std::size_t r = 0; r < ens.record_steps.size(); ++r) {
    if (ens.record_steps[r] > options.steps || (r > 0 && ens.record_steps[r] <= ens.record_steps[r - 1])) {
      throw ConfigurationError("sampler: record steps must increase strictly and not exceed the step count");
    }
    ens.times.push_back(options.t0 + static_cast<double>(ens.record_steps[r]) * options.dt);
  }
  const std::size_t chunks = (options.particles + kSamplerChunk - 1) / kSamplerChunk;
  for (std::size_t k = 0; k < chunks; ++k) ens.chunk_seeds.push_back(options.seed ^ (k * kChunkSeedStride));
  const std::size_t nrec = ens.record_steps.size();
  const std::size_t d = static_cast<std::size_t>(dim);
  ens.positions.assign(nrec * options.particles * d, std::numeric_limits<double>::quiet_NaN());

  std::optional<DensityDrawer> drawer;
  if (!options.start_point) drawer.emplace(box, source.density(box, options.t0));
  if (options.start_point) {
    for (int a = 0; a < dim; ++a) {
      const double x = (*options.start_point)[a];
      if (x < box.extents[a].min || x > box.extents[a].max) throw DomainError("sampler: start point outside the box");
    }
  }

  const double sigma = std::sqrt(units.eta * options.dt / units.mass);
  std::vector<std::size_t> reflections(chunks, 0), absorbed(chunks, 0);

  auto run_chunk = [&](std::size_t k) {
    const std::size_t first = k * kSamplerChunk;
    const std::size_t last = std::min(first + kSamplerChunk, options.particles);
    for (std::size_t p = first; p < last; ++p) {
      Stream s(particle_origin(ens.chunk_seeds[k], p - first));
      Point x = options.start_point ? *options.start_point : drawer->draw(s);
      bool alive = true;
      std::size_t rec = 0;
      auto store = [&](std::size_t step) {
        while (rec < nrec && ens.record_steps[rec] == step) {
          if (alive) {
            for (std::size_t a = 0; a < d; ++a) ens.positions[(rec * options.particles + p) * d + a] = x[a];
          }
          ++rec;
        }
      };
      store(0);
      for (std::size_t step = 0; step < options.steps && alive; ++step) {
        const double t = options.t0 + static_cast<double>(step) * options.dt;
        const Vec2 b = source.drift(x, t);
        const auto xi = s.normals();
        for (int a = 0; a < dim && alive; ++a) {
          double y = x[a] + b[a] * options.dt + sigma * xi[a];
          const double lo = box.extents[a].min, hi = box.extents[a].max;
          if (y < lo || y > hi) {
            if (options.absorbing) {
              alive = false;
              ++absorbed[k];
              break;
            }
            while (y < lo || y > hi) y = y < lo ? 2.0 * lo - y : 2.0 * hi - y;
            ++reflections[k];
          }
          x[a] = y;
        }
        store(step + 1);
      }
    }
  };

  const std::size_t nthreads = std::max<std::size_t>(1, std::min(options.threads, chunks));
  if (nthreads == 1) {
    for (std::size_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < chunks; k += nthreads) run_chunk(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t k = 0; k < chunks; ++k) {
    ens.reflections += reflections[k];
    ens.absorbed += absorbed[k];
  }
  return ens;
}

std::vector<Point> draw_from_density(const GridSpec& grid, const std::vector<double>& rho, std::size_t count,
                                     std::uint64_t seed) {
  const DensityDrawer drawer(grid, rho);
  Stream s(mix64(seed));
  std::vector<Point> out(count);
  for (auto& p : out) p = drawer.draw(s);
  return out;
}

namespace {

std::size_t nearest_bin(const GridSpec& g, const Point& x, bool& inside) {
  std::array<std::size_t, 2> idx{0, 0};
  inside = true;
  for (int a = 0; a < g.dim; ++a) {
    const double s = std::round((x[a] - g.extents[a].min) / g.spacing(a));
    if (!(s >= 0.0) || s > static_cast<double>(g.points[a] - 1)) {
      inside = false;
      return 0;
    }
    idx[a] = static_cast<std::size_t>(s);
  }
  return g.index(idx[0], idx[1]);
}

void check_ensemble(const TrajectoryEnsemble& e, const GridSpec& bins, std::size_t record) {
  if (e.particles == 0 || e.positions.empty()) throw DomainError("ensemble is empty");
  bins.validate();
  if (bins.dim != e.dim) throw ShapeError("binning grid dimension does not match ensemble");
  if (record >= e.record_steps.size()) throw DomainError("record index out of range");
}

}  // namespace

DriftEstimate estimate_drifts(const TrajectoryEnsemble& e, const GridSpec& bins, std::size_t record,
                              std::size_t min_count) {
  check_ensemble(e, bins, record);
  if (record == 0 || record + 1 >= e.record_steps.size() || e.record_steps[record] - e.record_steps[record - 1] != 1 ||
      e.record_steps[record + 1] - e.record_steps[record] != 1) {
    throw DomainError("drift estimate: records k-1, k, k+1 must be consecutive steps");
  }
  const std::size_t n = bins.size();
  DriftEstimate out;
  out.bins = bins;
  out.counts.assign(n, 0);
  out.valid.assign(n, 0);
  const VectorField zero{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  out.forward = out.backward = out.forward_se = out.backward_se = zero;
  // Welford accumulators: mean in forward/backward, M2 in the se fields.
  for (std::size_t p = 0; p < e.particles; ++p) {
    Point x{0.0, 0.0};
    bool live = true;
    for (int a = 0; a < e.dim; ++a) {
      x[a] = e.position(record, p, a);
      live = live && !std::isnan(x[a]) && !std::isnan(e.position(record - 1, p, a)) &&
             !std::isnan(e.position(record + 1, p, a));
    }
    if (!live) continue;
    bool inside = false;
    const std::size_t bin = nearest_bin(bins, x, inside);
    if (!inside) continue;
    const double cnt = static_cast<double>(++out.counts[bin]);
    for (int a = 0; a < e.dim; ++a) {
      const double fw = (e.position(record + 1, p, a) - x[a]) / e.dt;
      const double bw = (x[a] - e.position(record - 1, p, a)) / e.dt;
      double delta = fw - out.forward[a][bin];
      out.forward[a][bin] += delta / cnt;
      out.forward_se[a][bin] += delta * (fw - out.forward[a][bin]);
      delta = bw - out.backward[a][bin];
      out.backward[a][bin] += delta / cnt;
      out.backward_se[a][bin] += delta * (bw - out.backward[a][bin]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(out.counts[i]);
    out.valid[i] = out.counts[i] >= std::max<std::size_t>(min_count, 2);
    for (int a = 0; a < 2; ++a) {
      if (!out.valid[i]) {
        out.forward[a][i] = out.backward[a][i] = out.forward_se[a][i] = out.backward_se[a][i] = 0.0;
        continue;
      }
      out.forward_se[a][i] = std::sqrt(out.forward_se[a][i] / (c - 1.0) / c);
      out.backward_se[a][i] = std::sqrt(out.backward_se[a][i] / (c - 1.0) / c);
    }
  }
  return out;
}

std::vector<double> histogram(const TrajectoryEnsemble& e, const GridSpec& bins, std::size_t record) {
  check_ensemble(e, bins, record);
  std::vector<double> h(bins.size(), 0.0);
  std::size_t live = 0;
  for (std::size_t p = 0; p < e.particles; ++p) {
    Point x{0.0, 0.0};
    bool ok = true;
    for (int a = 0; a < e.dim; ++a) {
      x[a] = e.position(record, p, a);
      ok = ok && !std::isnan(x[a]);
    }
    if (!ok) continue;
    ++live;
    bool inside = false;
    const std::size_t bin = nearest_bin(bins, x, inside);
    if (inside) h[bin] += 1.0;
  }
  if (live == 0) return h;
  for (std::size_t k = 0; k < h.size(); ++k) {
    double area = 1.0;
    const Point node = bins.node(k);
    for (int a = 0; a < bins.dim; ++a) {
      const double c = node[a];
      const bool edge = c == bins.extents[a].min || c == bins.extents[a].max;
      area *= edge ? 0.5 * bins.spacing(a) : bins.spacing(a);
    }
    h[k] /= static_cast<double>(live) * area;
  }
  return h;
}

}  // namespace edlab
