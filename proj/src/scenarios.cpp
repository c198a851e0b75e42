#include "edlab/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "edlab/errors.hpp"

namespace edlab {
namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string at(double label, const std::string& unit) { return "@" + num(label) + unit; }

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw DomainError("scenario: at least one time is required");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) throw DomainError("scenario: times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("scenario: times must increase strictly");
  }
}

void add(SnapshotSet& s, std::string name, bool ok, std::string detail) {
  s.checks.push_back({std::move(name), ok, std::move(detail)});
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double moment(const GridSpec& g, const std::vector<double>& f, const std::vector<double>& w) {
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * w[i];
  return integrate(g, prod);
}

// Unit mass over the whole support of the state, not just the output grid.
double support_mass(const AnalyticState& s, double t) {
  const auto box = s.support(t);
  const GridSpec g = s.dim() == 1 ? GridSpec::line(box[0].min, box[0].max, 8001)
                                  : GridSpec::plane(box[0], box[1], 401, 401);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = s.density(g.node(i), t);
  return integrate(g, rho);
}

void mass_checks(SnapshotSet& set, const AnalyticState& s) {
  double worst = 0.0;
  for (const auto& snap : set.snapshots) {
    worst = std::max(worst, std::abs(support_mass(s, snap.time) - 1.0));
    set.report.emplace_back("mass_on_grid" + at(snap.label, set.time_unit), integrate(snap.fields.grid, snap.fields.rho));
  }
  add(set, "density integrates to 1", worst < 1e-6, "max |mass - 1| = " + num(worst));
}

// Grid path (finite differences of sampled psi) against the closed-form
// velocities where rho > 1e-6 max. Log-derivative stencils lose accuracy
// next to near-nodes, so 1D comparisons skip `guard` cells around every
// density local minimum below 0.1 max.
void grid_path_check(SnapshotSet& set, const AnalyticState& s, double tolerance, std::size_t guard = 10) {
  double worst = 0.0;
  for (const auto& snap : set.snapshots) {
    const VelocityFields& a = snap.fields;
    const VelocityFields g = velocities_from_wavefield(sample_wavefield(s, a.grid, snap.time), s.units());
    const double rmax = max_of(a.rho);
    const std::size_t n = a.rho.size();
    Mask skip(n, 0);
    if (a.grid.dim == 1) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (a.rho[i] < 0.1 * rmax && a.rho[i] <= a.rho[i - 1] && a.rho[i] <= a.rho[i + 1]) {
          for (std::size_t j = i > guard ? i - guard : 0; j <= std::min(n - 1, i + guard); ++j) skip[j] = 1;
        }
      }
    }
    for (int axis = 0; axis < a.grid.dim; ++axis) {
      double scale = 0.0, err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (a.rho[i] <= 1e-6 * rmax || !g.valid[i] || skip[i]) continue;
        scale = std::max({scale, std::abs(a.u[axis][i]), std::abs(a.v[axis][i])});
        err = std::max({err, std::abs(a.u[axis][i] - g.u[axis][i]), std::abs(a.v[axis][i] - g.v[axis][i])});
      }
      if (scale > 0.0) worst = std::max(worst, err / scale);
    }
  }
  add(set, "grid path matches closed form", worst < tolerance, "max relative velocity error = " + num(worst));
}

Snapshot make_snapshot(const AnalyticState& s, const GridSpec& grid, double time, double label) {
  Snapshot snap;
  snap.time = time;
  snap.label = label;
  snap.fields = analytic_fields(s, grid, time);
  return snap;
}

void require_1d(const GridSpec& g) {
  g.validate();
  if (g.dim != 1) throw DomainError("scenario: a 1D grid is required");
}

void require_2d(const GridSpec& g) {
  g.validate();
  if (g.dim != 2) throw DomainError("scenario: a 2D grid is required");
}

std::vector<double> locate(const GridSpec& grid, const std::vector<double>& rho, bool minima) {
  if (grid.dim != 1) throw DomainError("extrema: a 1D grid is required");
  if (rho.size() != grid.size()) throw ShapeError("extrema: density size does not match grid");
  std::vector<double> out;
  const double h = grid.spacing(0);
  const double sgn = minima ? 1.0 : -1.0;
  for (std::size_t i = 1; i + 1 < rho.size(); ++i) {
    const double a = sgn * rho[i - 1], b = sgn * rho[i], c = sgn * rho[i + 1];
    if (!(b < a && b < c)) continue;
    const double curv = a - 2.0 * b + c;
    const double shift = curv > 0.0 ? 0.5 * (a - c) / curv : 0.0;
    out.push_back(grid.coord(0, i) + shift * h);
  }
  return out;
}

// Index of the node closest to x.
std::size_t nearest_node(const GridSpec& g, double x) {
  const double s = std::round((x - g.extents[0].min) / g.spacing(0));
  return static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(g.points[0] - 1)));
}

void fill_extrema(SnapshotSet& set) {
  for (auto& snap : set.snapshots) {
    snap.minima = locate_minima(snap.fields.grid, snap.fields.rho);
    snap.maxima = locate_maxima(snap.fields.grid, snap.fields.rho);
  }
}

// Largest distance from an extremum in `a` to the nearest one in `b`, in
// both directions; infinity when either list is empty and the other is not.
double extrema_mismatch(const std::vector<double>& a, const std::vector<double>& b) {
  auto one_way = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace

bool SnapshotSet::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double SnapshotSet::value(const std::string& key) const {
  for (const auto& [k, v] : report) {
    if (k == key) return v;
  }
  throw DomainError("snapshot set: no report entry " + key);
}

const CheckResult& SnapshotSet::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw DomainError("snapshot set: no check " + name);
}

GridSpec default_grid_1d(double scale) { return GridSpec::line(-40.0 * scale, 40.0 * scale, 1024); }
GridSpec default_grid_2d(double scale) { return GridSpec::square(-6.0 * scale, 6.0 * scale, 256); }

void SlitConfig::validate() const {
  if (!(l > 0.0) || !(sigma0 > 0.0) || !std::isfinite(l) || !std::isfinite(sigma0)) {
    throw DomainError("slits: l and sigma0 must be positive");
  }
  if (std::abs(std::norm(w1) + std::norm(w2) - 1.0) > 1e-9) {
    throw DomainError("slits: |w1|^2 + |w2|^2 must equal 1");
  }
}

bool SlitConfig::equal_real() const {
  return w1 == w2 && w1.imag() == 0.0 && std::abs(w1.real() - 1.0 / std::sqrt(2.0)) < 1e-15;
}

AnalyticState double_slit_state(const SlitConfig& slits, const UnitsConfig& units) {
  slits.validate();
  const AnalyticState s1 = free_gaussian(slits.sigma0, units, -slits.l);
  const AnalyticState s2 = free_gaussian(slits.sigma0, units, slits.l);
  if (slits.equal_real()) return superpose2_equal_real(s1, s2);
  return superpose2_general(s1, s2, slits.w1, slits.w2);
}

double double_slit_density(double x, double t, double l, double sigma0, const UnitsConfig& units) {
  const double T = characteristic_time(sigma0, units);
  const double d = t * t + T * T;
  const double s2 = sigma0 * sigma0 * d / (T * T);
  const double k = x * l / (sigma0 * sigma0);
  const double c = k * T * T / d;
  const double a = (x * x + l * l) / (2.0 * sigma0 * sigma0) * T * T / d;
  // cosh c = e^{|c|} (1 + e^{-2|c|}) / 2 keeps large |c| finite.
  const double hyper = 0.5 * std::exp(std::abs(c) - a) * (1.0 + std::exp(-2.0 * std::abs(c)));
  return (hyper + std::exp(-a) * std::cos(k * T * t / d)) / std::sqrt(2.0 * kPi * s2);
}

double double_slit_minimum(int n, double t, double l, double sigma0, const UnitsConfig& units) {
  const double T = characteristic_time(sigma0, units);
  return (2.0 * n + 1.0) * kPi * sigma0 * sigma0 * t / (T * l);
}

std::vector<double> locate_minima(const GridSpec& grid, const std::vector<double>& rho) {
  return locate(grid, rho, true);
}

std::vector<double> locate_maxima(const GridSpec& grid, const std::vector<double>& rho) {
  return locate(grid, rho, false);
}

AngularMomentum angular_momentum(const GridSpec& grid, const std::vector<double>& rho, const VectorField& v,
                                 const UnitsConfig& units) {
  grid.validate();
  if (grid.dim != 2) throw DomainError("angular momentum: a 2D grid is required");
  if (rho.size() != grid.size() || v[0].size() != grid.size() || v[1].size() != grid.size()) {
    throw ShapeError("angular momentum: grid mismatch");
  }
  AngularMomentum out;
  out.lc.resize(grid.size());
  std::vector<double> weighted(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.node(i);
    out.lc[i] = units.mass * (p[0] * v[1][i] - p[1] * v[0][i]);
    weighted[i] = rho[i] * out.lc[i];
  }
  const double mass = integrate(grid, rho);
  if (!(mass > 0.0)) throw DegenerateFieldError("angular momentum: zero density");
  out.mean = integrate(grid, weighted) / mass;
  return out;
}

SnapshotSet run_free_packet(double sigma0, const UnitsConfig& units, const std::vector<double>& times,
                            const GridSpec& grid) {
  require_1d(grid);
  check_times(times);
  const AnalyticState s = free_gaussian(sigma0, units);
  const double T = characteristic_time(sigma0, units);
  SnapshotSet set;
  set.scenario = "free_packet";
  set.time_unit = "T";
  double var_err = 0.0, mean_u = 0.0;
  for (double tau : times) {
    set.snapshots.push_back(make_snapshot(s, grid, tau * T, tau));
    const auto& f = set.snapshots.back().fields;
    const auto x = grid.axis_coords(0);
    std::vector<double> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    const double var = moment(grid, f.rho, x2) / integrate(grid, f.rho);
    const double want = sigma0 * sigma0 * (1.0 + tau * tau);
    set.report.emplace_back("variance" + at(tau, "T"), var);
    set.report.emplace_back("variance_analytic" + at(tau, "T"), want);
    var_err = std::max(var_err, std::abs(var - want) / want);
    mean_u = std::max(mean_u, std::abs(integrate(grid, f.flux_u[0])));
    if (tau == 1.0) {
      const double fb = max_of(f.flux_b[0]);
      set.report.emplace_back("max_abs_flux_b@1T", fb);
      add(set, "drift flux vanishes at T", fb < 1e-10, "max |rho b| = " + num(fb));
    }
  }
  add(set, "variance follows sigma0^2 (1 + (t/T)^2)", var_err < 1e-6, "max relative error = " + num(var_err));
  add(set, "osmotic flux integrates to zero", mean_u < 1e-10, "max |integral rho u| = " + num(mean_u));
  mass_checks(set, s);
  grid_path_check(set, s, 1e-4);
  return set;
}

SnapshotSet run_double_slit(const SlitConfig& slits, const UnitsConfig& units, const std::vector<double>& times,
                            const GridSpec& grid) {
  require_1d(grid);
  check_times(times);
  const AnalyticState s = double_slit_state(slits, units);
  const double T = characteristic_time(slits.sigma0, units);
  const double dx = grid.spacing(0);
  SnapshotSet set;
  set.scenario = "double_slit";
  set.time_unit = "T";
  for (double tau : times) set.snapshots.push_back(make_snapshot(s, grid, tau * T, tau));
  fill_extrema(set);

  if (slits.equal_real()) {
    // Closed-form density (rescaled by N^2) and mirror symmetry.
    const double n2 = superposition_info(s).norm_factor;
    double form = 0.0, sym = 0.0;
    for (const auto& snap : set.snapshots) {
      const double rmax = max_of(snap.fields.rho);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.coord(0, i);
        const double direct = n2 * double_slit_density(x, snap.time, slits.l, slits.sigma0, units);
        form = std::max(form, std::abs(snap.fields.rho[i] - direct) / rmax);
        sym = std::max(sym, std::abs(s.density({x, 0.0}, snap.time) - s.density({-x, 0.0}, snap.time)) / rmax);
      }
    }
    add(set, "density matches the closed form", form < 1e-12, "max relative deviation = " + num(form));
    add(set, "density is mirror symmetric", sym <= 1e-12, "max relative asymmetry = " + num(sym));
  }

  for (const auto& snap : set.snapshots) {
    const std::string tag = at(snap.label, "T");
    set.report.emplace_back("minima_count" + tag, static_cast<double>(snap.minima.size()));
    if (snap.label == 0.0) {
      const auto& mx = snap.maxima;
      const bool two = mx.size() == 2 && std::abs(mx[0] + slits.l) <= dx && std::abs(mx[1] - slits.l) <= dx;
      add(set, "two humps at t = 0", two, std::to_string(mx.size()) + " maxima");
    }
    if (snap.label > 0.0) {
      double lowest = std::numeric_limits<double>::infinity();
      for (double x : snap.minima) lowest = std::min(lowest, snap.fields.rho[nearest_node(grid, x)]);
      if (!snap.minima.empty()) {
        set.report.emplace_back("lowest_minimum" + tag, lowest);
        add(set, "minima strictly positive" + tag, lowest > 0.0, "lowest minimum density = " + num(lowest));
      }
    }
    if (snap.label >= 10.0) {
      // Large-t law, n = 0..4 on each side.
      bool ok = true;
      std::ostringstream detail;
      for (int n = 0; n <= 4; ++n) {
        const double xn = double_slit_minimum(n, snap.time, slits.l, slits.sigma0, units);
        for (double side : {-1.0, 1.0}) {
          double best = std::numeric_limits<double>::infinity();
          for (double x : snap.minima) {
            if (std::abs(x - side * xn) < std::abs(best - side * xn)) best = x;
          }
          const double tol = std::max(dx, 0.01 * xn);
          const bool hit = std::isfinite(best) && std::abs(best - side * xn) <= tol;
          const std::string key = "minimum_n" + std::to_string(n) + (side < 0 ? "_left" : "_right") + tag;
          set.report.emplace_back(key + "_law", side * xn);
          set.report.emplace_back(key + "_found", hit ? best : std::numeric_limits<double>::quiet_NaN());
          if (!hit) {
            ok = false;
            detail << "n=" << n << (side < 0 ? " left" : " right") << " law " << num(side * xn) << " nearest "
                   << (std::isfinite(best) ? num(best) : "none") << "; ";
          }
        }
      }
      add(set, "minima follow (2n+1) pi sigma0^2 t / (T l)" + tag, ok, ok ? "all matched" : detail.str());
    }
  }

  // x_n grows linearly in t, so the count inside a fixed window falls as 1/t.
  const Snapshot* s6 = nullptr;
  const Snapshot* s12 = nullptr;
  for (const auto& snap : set.snapshots) {
    if (snap.label == 6.0) s6 = &snap;
    if (snap.label == 12.0) s12 = &snap;
  }
  if (s6 && s12) {
    const double X = 0.75 * grid.extents[0].max;
    auto count = [&](const Snapshot& sn) {
      return static_cast<long>(std::count_if(sn.minima.begin(), sn.minima.end(), [&](double x) { return std::abs(x) < X; }));
    };
    const long c6 = count(*s6), c12 = count(*s12);
    set.report.emplace_back("minima_in_window@6T", static_cast<double>(c6));
    set.report.emplace_back("minima_in_window@12T", static_cast<double>(c12));
    add(set, "fringe count in a fixed window halves from 6T to 12T", std::abs(c6 - 2 * c12) <= 2,
        "count(6T) = " + std::to_string(c6) + ", count(12T) = " + std::to_string(c12));
  }
  mass_checks(set, s);
  return set;
}

SnapshotSet run_double_slit_unequal(const SlitConfig& slits, const UnitsConfig& units,
                                    const std::vector<double>& times, const GridSpec& grid) {
  SnapshotSet set = run_double_slit(slits, units, times, grid);
  set.scenario = "double_slit_unequal";
  const SlitConfig equal{slits.l, slits.sigma0, {1.0 / std::sqrt(2.0), 0.0}, {1.0 / std::sqrt(2.0), 0.0}};
  const SnapshotSet ref = run_double_slit(equal, units, times, grid);
  const double dx = grid.spacing(0);
  double worst = 0.0;
  bool higher = true, counts_match = true;
  for (std::size_t k = 0; k < set.snapshots.size(); ++k) {
    const Snapshot& a = set.snapshots[k];
    const Snapshot& b = ref.snapshots[k];
    if (a.label == 0.0) continue;
    const double dmin = extrema_mismatch(b.minima, a.minima);
    const double dmax = extrema_mismatch(b.maxima, a.maxima);
    set.report.emplace_back("extrema_shift" + at(a.label, "T"), std::max(dmin, dmax));
    set.report.emplace_back("extrema_count" + at(a.label, "T"), static_cast<double>(a.minima.size() + a.maxima.size()));
    set.report.emplace_back("extrema_count_equal" + at(a.label, "T"),
                            static_cast<double>(b.minima.size() + b.maxima.size()));
    if (a.minima.size() != b.minima.size() || a.maxima.size() != b.maxima.size()) counts_match = false;
    worst = std::max({worst, dmin, dmax});
    // Maxima on the heavier side against their mirror images.
    const bool right_heavy = std::norm(slits.w2) > std::norm(slits.w1);
    for (double x : a.maxima) {
      if ((x > 0.0) != right_heavy || std::abs(x) < dx) continue;
      const double mirror = a.fields.rho[nearest_node(grid, -x)];
      const double here = a.fields.rho[nearest_node(grid, x)];
      if (!(here > mirror)) higher = false;
    }
  }
  set.report.emplace_back("extrema_shift_max", worst);
  set.report.emplace_back("grid_spacing", dx);
  add(set, "extrema coincide with the equal-weight run", worst <= dx && counts_match,
      "max nearest-extremum shift = " + num(worst) + ", grid spacing = " + num(dx) +
          (counts_match ? "" : ", extrema counts differ"));
  add(set, "heavier side maxima exceed their mirrors", higher, higher ? "all higher" : "some maximum is not higher");

  // Weights (1, 0) reduce to a single packet at -l.
  const SlitConfig single{slits.l, slits.sigma0, {1.0, 0.0}, {0.0, 0.0}};
  const AnalyticState one = double_slit_state(single, units);
  const AnalyticState g = free_gaussian(slits.sigma0, units, -slits.l);
  double dev = 0.0;
  for (double t : {0.0, characteristic_time(slits.sigma0, units), 6.0 * characteristic_time(slits.sigma0, units)}) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point p = grid.node(i);
      const double want = g.density(p, t);
      dev = std::max(dev, std::abs(one.density(p, t) - want) / std::max(want, 1e-300));
      if (want < 1e-250) break;
    }
  }
  add(set, "weights (1, 0) give the single slit", dev < 1e-12, "max relative deviation = " + num(dev));
  return set;
}

SnapshotSet run_double_slit_extreme(double alpha2, const SlitConfig& geometry, const UnitsConfig& units,
                                    const std::vector<double>& times, const GridSpec& grid) {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw DomainError("extreme slits: alpha^2 must lie in (0, 1)");
  const double a = std::sqrt(alpha2), b = std::sqrt(1.0 - alpha2);
  SlitConfig slits = geometry;
  slits.w1 = {a, 0.0};
  slits.w2 = {b, 0.0};
  const AnalyticState s = double_slit_state(slits, units);
  SnapshotSet set = run_double_slit(slits, units, times, grid);
  set.scenario = "double_slit_extreme";
  const double coeff = 2.0 * a * b;
  set.report.emplace_back("cross_coefficient", coeff);
  // The 0.0632 reference value is 2 sqrt(1e-3 (1 - 1e-3)); other ratios only report it.
  if (std::abs(alpha2 - 1e-3) < 1e-12) {
    add(set, "cross coefficient 2 alpha beta", std::abs(coeff - 0.0632) <= 1e-4, "2 alpha beta = " + num(coeff));
  }

  // Hump heights at t = 0: ratio alpha^2 / beta^2 up to the vanishing cross term.
  const double left = s.density({-slits.l, 0.0}, 0.0);
  const double right = s.density({slits.l, 0.0}, 0.0);
  const double ratio = left / right;
  set.report.emplace_back("hump_ratio@0T", ratio);
  add(set, "weak hump is alpha^2/beta^2 of the strong one", std::abs(ratio / (alpha2 / (1.0 - alpha2)) - 1.0) < 1e-4,
      "ratio = " + num(ratio));

  // Visibility of the cross term at t = 2T is confined near the weak slit.
  const double T = characteristic_time(slits.sigma0, units);
  const double t = 2.0 * T;
  const AnalyticState p1 = free_gaussian(slits.sigma0, units, -slits.l);
  const AnalyticState p2 = free_gaussian(slits.sigma0, units, slits.l);
  const double sig_t = slits.sigma0 * std::sqrt(1.0 + 4.0);
  bool confined = true, present = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.node(i);
    const double r1 = alpha2 * p1.density(x, t), r2 = (1.0 - alpha2) * p2.density(x, t);
    if (r1 + r2 <= 0.0) continue;
    const double depth = 2.0 * std::sqrt(r1 * r2) / (r1 + r2);
    if (depth > 0.05) {
      present = true;
      if (std::abs(x[0] + slits.l) >= 3.0 * sig_t) confined = false;
    }
  }
  add(set, "ripples confined near the weak slit at 2T", confined && present,
      present ? (confined ? "modulation above 5% only within 3 sigma_t" : "modulation above 5% far from the weak slit")
              : "no modulation above 5%");
  return set;
}

SnapshotSet run_ho_1d(double omega, const UnitsConfig& units, const std::vector<double>& fractions,
                      const GridSpec& grid) {
  require_1d(grid);
  check_times(fractions);
  const AnalyticState s = ho_superposition_1d(omega, units);
  const double P = 2.0 * kPi / omega;
  SnapshotSet set;
  set.scenario = "ho_1d";
  set.time_unit = "period";
  const auto x = grid.axis_coords(0);
  auto mean_x = [&](double t) {
    std::vector<double> rho(grid.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = s.density({x[i], 0.0}, t);
    return moment(grid, rho, x);
  };
  const double a0 = mean_x(0.0);
  set.report.emplace_back("mean_x_amplitude", a0);
  double cos_err = 0.0, flux_err = 0.0, parity = 0.0;
  for (double f : fractions) {
    const double t = f * P;
    set.snapshots.push_back(make_snapshot(s, grid, t, f));
    const auto& fields = set.snapshots.back().fields;
    const double mx = moment(grid, fields.rho, x);
    const double current = integrate(grid, fields.flux_v[0]);
    cos_err = std::max(cos_err, std::abs(mx - a0 * std::cos(omega * t)));
    flux_err = std::max(flux_err, std::abs(current + omega * a0 * std::sin(omega * t)));
    set.report.emplace_back("mean_x" + at(f, "period"), mx);
    set.report.emplace_back("net_current" + at(f, "period"), current);
    set.report.emplace_back("current_sign" + at(f, "period"),
                            std::abs(current) < 1e-12 ? 0.0 : (current > 0.0 ? 1.0 : -1.0));
    const double rmax = max_of(fields.rho);
    for (double xi : x) {
      parity = std::max(parity, std::abs(s.density({xi, 0.0}, t) - s.density({-xi, 0.0}, t + kPi / omega)) / rmax);
    }
  }
  add(set, "<x> follows cos(omega t)", cos_err < 1e-8, "max deviation = " + num(cos_err));
  const double half = mean_x(0.5 * P), quarter = mean_x(0.25 * P);
  add(set, "<x> extremal at 0 and pi/omega, zero at pi/(2 omega)",
      std::abs(half + a0) < 1e-8 && std::abs(quarter) < 1e-8 && std::abs(a0) > 0.1,
      "<x>(0) = " + num(a0) + ", <x>(pi/omega) = " + num(half) + ", <x>(pi/2omega) = " + num(quarter));
  add(set, "rho(x, t) = rho(-x, t + pi/omega)", parity < 1e-12, "max relative deviation = " + num(parity));
  add(set, "current integrates to d<x>/dt", flux_err < 1e-6, "max deviation = " + num(flux_err));
  mass_checks(set, s);
  grid_path_check(set, s, 1e-3);
  return set;
}

AnalyticState rotating_state(double omega, const UnitsConfig& units) {
  return superpose2_equal_imag(ho_product_2d(0, 1, omega, units), ho_product_2d(1, 0, omega, units));
}

AnalyticState breathing_state(double omega, const UnitsConfig& units) {
  return superpose2_equal_real(ho_product_2d(0, 0, omega, units), ho_product_2d(1, 1, omega, units));
}

SnapshotSet run_ho_2d_rotating(double omega, const UnitsConfig& units, const std::vector<double>& fractions,
                               const GridSpec& grid) {
  require_2d(grid);
  check_times(fractions);
  const AnalyticState s = rotating_state(omega, units);
  const double P = 2.0 * kPi / omega;
  const double r0 = std::sqrt(units.hbar / (units.mass * omega));
  SnapshotSet set;
  set.scenario = "ho_2d_rotating";
  set.time_unit = "period";
  for (double f : fractions) set.snapshots.push_back(make_snapshot(s, grid, f * P, f));

  double drift = 0.0, speed = 0.0, lc = 0.0, ring_err = 0.0;
  const double target = units.hbar / units.mass;
  for (const auto& snap : set.snapshots) {
    const auto& f0 = set.snapshots.front().fields;
    drift = std::max(drift, max_of([&] {
                       std::vector<double> d(f0.rho.size());
                       for (std::size_t i = 0; i < d.size(); ++i) d[i] = snap.fields.rho[i] - f0.rho[i];
                       return d;
                     }()));
    // Rings r in [0.3, 3] r0 sampled at 24 angles.
    for (int k = 0; k <= 27; ++k) {
      const double r = (0.3 + 0.1 * k) * r0;
      for (int j = 0; j < 24; ++j) {
        const double th = 2.0 * kPi * (j + 0.5) / 24.0;
        const LocalFlow fl = s.evaluate({r * std::cos(th), r * std::sin(th)}, snap.time);
        speed = std::max(speed, std::abs(std::hypot(fl.v[0], fl.v[1]) * r - target) / target);
        const double l = units.mass * (r * std::cos(th) * fl.v[1] - r * std::sin(th) * fl.v[0]);
        lc = std::max(lc, std::abs(l + units.hbar) / units.hbar);
      }
    }
    const AngularMomentum am = angular_momentum(grid, snap.fields.rho, snap.fields.v, units);
    set.report.emplace_back("mean_L" + at(snap.label, "period"), am.mean);
    const VelocityFields g = velocities_from_wavefield(sample_wavefield(s, grid, snap.time), units);
    const AngularMomentum gm = angular_momentum(grid, g.rho, g.v, units);
    set.report.emplace_back("mean_L_grid" + at(snap.label, "period"), gm.mean);
    ring_err = std::max(ring_err, std::abs(gm.mean + units.hbar) / units.hbar);
  }
  // Radial profile maximum: r^2 exp(-r^2 / r0^2) peaks at r0.
  double best_r = 0.0, best = -1.0;
  for (int k = 0; k <= 4000; ++k) {
    const double r = 3.0 * r0 * k / 4000.0;
    const double d = s.density({r, 0.0}, 0.0);
    if (d > best) {
      best = d;
      best_r = r;
    }
  }
  set.report.emplace_back("density_ring_radius", best_r);
  add(set, "density is time independent", drift < 1e-12, "max |rho(t) - rho(0)| = " + num(drift));
  add(set, "|v| r = hbar/m on r in [0.3, 3] r0", speed < 1e-6, "max relative deviation = " + num(speed));
  add(set, "L_c = -hbar off the origin", lc < 1e-10, "max relative deviation = " + num(lc));
  add(set, "<L> = -hbar from the grid path", ring_err < 1e-4, "max relative deviation = " + num(ring_err));
  add(set, "density maximal on r = sqrt(hbar/(m omega))", std::abs(best_r - r0) <= 3.0 * r0 / 4000.0,
      "peak radius = " + num(best_r));
  mass_checks(set, s);
  return set;
}

SnapshotSet run_ho_2d_breathing(double omega, const UnitsConfig& units, const std::vector<double>& fractions,
                                const GridSpec& grid) {
  require_2d(grid);
  check_times(fractions);
  const AnalyticState s = breathing_state(omega, units);
  const double C = kPi / omega;
  const double k = units.mass * omega / units.hbar;
  SnapshotSet set;
  set.scenario = "ho_2d_breathing";
  set.time_unit = "cycle";
  for (double f : fractions) set.snapshots.push_back(make_snapshot(s, grid, f * C, f));

  double periodic = 0.0;
  for (const auto& snap : set.snapshots) {
    const double rmax = max_of(snap.fields.rho);
    for (std::size_t i = 0; i < grid.size(); i += 7) {
      const Point p = grid.node(i);
      periodic = std::max(periodic, std::abs(s.density(p, snap.time + C) - snap.fields.rho[i]) / rmax);
    }
    // Radial flux per quadrant (x>0,y>0), (x<0,y>0), (x<0,y<0), (x>0,y<0).
    std::array<std::vector<double>, 4> q;
    for (auto& v : q) v.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point p = grid.node(i);
      const double r = std::hypot(p[0], p[1]);
      if (r == 0.0 || p[0] == 0.0 || p[1] == 0.0) continue;
      const double radial = (p[0] * snap.fields.flux_v[0][i] + p[1] * snap.fields.flux_v[1][i]) / r;
      const int quad = p[1] > 0.0 ? (p[0] > 0.0 ? 0 : 1) : (p[0] < 0.0 ? 2 : 3);
      q[quad][i] = radial;
    }
    for (int a = 0; a < 4; ++a) {
      const double flux = integrate(grid, q[a]);
      set.report.emplace_back("radial_flux_q" + std::to_string(a + 1) + at(snap.label, "cycle"), flux);
    }
  }
  add(set, "rho(t + pi/omega) = rho(t)", periodic < 1e-12, "max relative deviation = " + num(periodic));

  // Quarter cycle: cos(2 omega t) = 0.
  double quarter = 0.0;
  const double tq = 0.25 * C;
  for (std::size_t i = 0; i < grid.size(); i += 5) {
    const Point p = grid.node(i);
    const double want = 0.5 * (k / kPi) * std::exp(-k * (p[0] * p[0] + p[1] * p[1])) *
                        (1.0 + 4.0 * k * k * p[0] * p[0] * p[1] * p[1]);
    quarter = std::max(quarter, std::abs(s.density(p, tq) - want) / (k / kPi));
  }
  add(set, "quarter-cycle density has no cross term", quarter < 1e-12, "max relative deviation = " + num(quarter));

  // Flux reversal across the half cycle.
  const double eps = 1e-3 * C;
  const VelocityFields before = analytic_fields(s, grid, 0.5 * C - eps);
  const VelocityFields after = analytic_fields(s, grid, 0.5 * C + eps);
  const double rmax = max_of(before.rho);
  std::size_t high = 0, reversed = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (before.rho[i] < 0.1 * rmax) continue;
    ++high;
    const double dot = before.v[0][i] * after.v[0][i] + before.v[1][i] * after.v[1][i];
    if (dot < 0.0) ++reversed;
  }
  const double frac = high ? static_cast<double>(reversed) / static_cast<double>(high) : 0.0;
  set.report.emplace_back("reversed_fraction@0.5cycle", frac);
  add(set, "current reverses across the half cycle", frac > 0.9, "reversed on " + num(100.0 * frac) + "% of high-density nodes");
  mass_checks(set, s);
  return set;
}

}  // namespace edlab
