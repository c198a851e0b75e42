#include "edlab/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "edlab/errors.hpp"

namespace edlab {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

LocalFlow undefined_flow(double phase = 0.0) {
  LocalFlow f;
  f.R = kNegInf;
  f.phase = phase;
  f.defined = false;
  return f;
}

void finish(LocalFlow& f) {
  for (int a = 0; a < 2; ++a) f.b[a] = f.v[a] - f.u[a];
}

std::array<Extent, 2> union_box(const std::array<Extent, 2>& a, const std::array<Extent, 2>& b) {
  return {Extent{std::min(a[0].min, b[0].min), std::max(a[0].max, b[0].max)},
          Extent{std::min(a[1].min, b[1].min), std::max(a[1].max, b[1].max)}};
}

// ---------------------------------------------------------------------------

class FreeGaussian final : public StateImpl {
 public:
  FreeGaussian(double sigma0, UnitsConfig units, double center, double k0)
      : sigma0_(sigma0), units_(units), center_(center), k0_(k0),
        T_(characteristic_time(sigma0, units)) {}

  StateKind kind() const override { return StateKind::FreeGaussian; }
  int dim() const override { return 1; }
  const UnitsConfig& units() const override { return units_; }

  LocalFlow evaluate(const Point& p, double t) const override {
    const double hbar = units_.hbar;
    const double m = units_.mass;
    const double tau = t / T_;
    const double s2 = sigma0_ * sigma0_ * (1.0 + tau * tau);
    const double group = hbar * k0_ / m;
    const double y = p[0] - center_ - group * t;
    LocalFlow f;
    f.R = -y * y / (4.0 * s2) - 0.25 * std::log(2.0 * pi * s2);
    f.phase = (y * y / (4.0 * s2)) * tau - 0.5 * std::atan(tau) + k0_ * (p[0] - center_) -
              0.5 * hbar * k0_ * k0_ * t / m;
    const double denom = t * t + T_ * T_;
    f.v[0] = y * t / denom + group;
    f.u[0] = (units_.eta / hbar) * y * T_ / denom;
    finish(f);
    return f;
  }

  std::array<Extent, 2> support(double t) const override {
    const double tau = t / T_;
    const double st = sigma0_ * std::sqrt(1.0 + tau * tau);
    const double c = center_ + units_.hbar * k0_ / units_.mass * t;
    return {Extent{c - 12.0 * st, c + 12.0 * st}, Extent{0.0, 0.0}};
  }

 private:
  double sigma0_;
  UnitsConfig units_;
  double center_;
  double k0_;
  double T_;
};

// ---------------------------------------------------------------------------

struct Oscillator1D {
  int n;
  double omega;
  UnitsConfig units;
  double scale;     // sqrt(m omega / hbar)
  double log_norm;  // log of (m omega / pi hbar)^{1/4} (2^n n!)^{-1/2}

  Oscillator1D(int n_, double omega_, const UnitsConfig& u) : n(n_), omega(omega_), units(u) {
    if (n < 0) throw DomainError("oscillator: quantum number must be non-negative");
    if (n > 60) throw DomainError("oscillator: quantum number above 60 overflows the Hermite recurrence");
    if (!(omega > 0.0)) throw DomainError("oscillator: omega must be positive");
    units.validate();
    scale = std::sqrt(units.mass * omega / units.hbar);
    log_norm = 0.25 * std::log(units.mass * omega / (pi * units.hbar)) -
               0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0));
  }

  // R, sign of H_n and dR/dx at x; sign 0 marks an exact node.
  void eval(double x, double& R, int& sign, double& dRdx) const {
    const double xi = scale * x;
    const HermiteValue h = hermite(n, xi);
    if (h.hn == 0.0) {
      R = kNegInf;
      sign = 0;
      dRdx = 0.0;
      return;
    }
    R = log_norm + std::log(std::abs(h.hn)) + h.log_scale - 0.5 * xi * xi;
    sign = h.hn > 0.0 ? 1 : -1;
    dRdx = scale * (2.0 * n * h.hn_minus_1 / h.hn - xi);
  }

  // Real eigenfunction and its derivative (no time factor).
  double psi(double x) const {
    const double xi = scale * x;
    const HermiteValue h = hermite(n, xi);
    return std::exp(log_norm + h.log_scale - 0.5 * xi * xi) * h.hn;
  }
  double dpsi(double x) const {
    const double xi = scale * x;
    const HermiteValue h = hermite(n, xi);
    return std::exp(log_norm + h.log_scale - 0.5 * xi * xi) * scale * (2.0 * n * h.hn_minus_1 - xi * h.hn);
  }

  double half_width() const { return (std::sqrt(2.0 * n + 1.0) + 10.0) / scale; }
};

class HOEigen1D final : public StateImpl {
 public:
  HOEigen1D(int n, double omega, const UnitsConfig& units) : osc_(n, omega, units) {}

  StateKind kind() const override { return StateKind::HOEigen1D; }
  int dim() const override { return 1; }
  const UnitsConfig& units() const override { return osc_.units; }

  LocalFlow evaluate(const Point& p, double t) const override {
    double R, dR;
    int sign;
    osc_.eval(p[0], R, sign, dR);
    const double phase = -(osc_.n + 0.5) * osc_.omega * t + (sign < 0 ? pi : 0.0);
    if (sign == 0) return undefined_flow(phase);
    LocalFlow f;
    f.R = R;
    f.phase = phase;
    f.u[0] = -(osc_.units.eta / osc_.units.mass) * dR;
    finish(f);
    return f;
  }

  std::array<cplx, 2> amplitude_gradient(const Point& p, double t) const override {
    return {std::polar(osc_.dpsi(p[0]), -(osc_.n + 0.5) * osc_.omega * t), 0.0};
  }

  std::array<Extent, 2> support(double) const override {
    const double w = osc_.half_width();
    return {Extent{-w, w}, Extent{0.0, 0.0}};
  }

 private:
  Oscillator1D osc_;
};

class HOProduct2D final : public StateImpl {
 public:
  HOProduct2D(int n, int m, double omega, const UnitsConfig& units)
      : ox_(n, omega, units), oy_(m, omega, units) {}

  StateKind kind() const override { return StateKind::HOProduct2D; }
  int dim() const override { return 2; }
  const UnitsConfig& units() const override { return ox_.units; }

  LocalFlow evaluate(const Point& p, double t) const override {
    double rx, ry, dx, dy;
    int sx, sy;
    ox_.eval(p[0], rx, sx, dx);
    oy_.eval(p[1], ry, sy, dy);
    const double phase =
        -(ox_.n + oy_.n + 1.0) * ox_.omega * t + ((sx < 0) != (sy < 0) ? pi : 0.0);
    if (sx == 0 || sy == 0) return undefined_flow(phase);
    LocalFlow f;
    f.R = rx + ry;
    f.phase = phase;
    const double c = ox_.units.eta / ox_.units.mass;
    f.u = {-c * dx, -c * dy};
    finish(f);
    return f;
  }

  std::array<cplx, 2> amplitude_gradient(const Point& p, double t) const override {
    const cplx time = std::polar(1.0, -(ox_.n + oy_.n + 1.0) * ox_.omega * t);
    return {time * (ox_.dpsi(p[0]) * oy_.psi(p[1])), time * (ox_.psi(p[0]) * oy_.dpsi(p[1]))};
  }

  std::array<Extent, 2> support(double) const override {
    const double wx = ox_.half_width();
    const double wy = oy_.half_width();
    return {Extent{-wx, wx}, Extent{-wy, wy}};
  }

 private:
  Oscillator1D ox_;
  Oscillator1D oy_;
};

// ---------------------------------------------------------------------------

class Superposition final : public StateImpl {
 public:
  Superposition(AnalyticState s1, AnalyticState s2, cplx w1, cplx w2, SuperpositionForm form)
      : s1_(std::move(s1)), s2_(std::move(s2)), w1_(w1), w2_(w2), form_(form) {
    if (s1_.dim() != s2_.dim()) throw DomainError("superposition: components differ in dimension");
    if (!(s1_.units() == s2_.units())) throw DomainError("superposition: components differ in units");
    if (w1_ == 0.0 && w2_ == 0.0) throw DomainError("superposition: both weights are zero");
    overlap_ = compute_overlap();
    const double denom =
        std::norm(w1_) + std::norm(w2_) + 2.0 * (std::conj(w1_) * w2_ * overlap_).real();
    if (!(denom > 0.0)) throw DomainError("superposition: combined state has zero norm");
    norm2_ = 1.0 / denom;
    half_log_norm2_ = 0.5 * std::log(norm2_);
  }

  StateKind kind() const override { return StateKind::Superposition2; }
  int dim() const override { return s1_.dim(); }
  const UnitsConfig& units() const override { return s1_.units(); }

  SuperpositionInfo info() const { return {form_, w1_, w2_, norm2_, overlap_}; }

  cplx amplitude(const Point& p, double t) const override {
    return std::sqrt(norm2_) * (w1_ * s1_.amplitude(p, t) + w2_ * s2_.amplitude(p, t));
  }

  LocalFlow evaluate(const Point& p, double t) const override {
    const LocalFlow f1 = s1_.evaluate(p, t);
    const LocalFlow f2 = s2_.evaluate(p, t);
    const double la = w1_ == 0.0 ? kNegInf : std::log(std::abs(w1_)) + f1.R;
    const double lb = w2_ == 0.0 ? kNegInf : std::log(std::abs(w2_)) + f2.R;
    const double p1 = f1.phase + (w1_ == 0.0 ? 0.0 : std::arg(w1_));
    const double p2 = f2.phase + (w2_ == 0.0 ? 0.0 : std::arg(w2_));
    if (la == kNegInf && lb == kNegInf) return undefined_flow(p1);
    if (la == kNegInf) return at_node(p, t, f2, lb, p2, w1_, s1_);
    if (lb == kNegInf) return at_node(p, t, f1, la, p1, w2_, s2_);

    const double eta_hbar = units().eta / units().hbar;
    const double delta = p1 - p2;
    double logscale, den;
    double su, sv_u;  // coefficients of (u1-u2) in u and (v1-v2) in v
    double cu, cv;    // coefficients of (v1-v2) in u and (u1-u2) in v
    if (form_ == SuperpositionForm::General) {
      const double mx = std::max(la, lb);
      const double a = std::exp(la - mx);
      const double b = std::exp(lb - mx);
      const double ab2 = 2.0 * (a * b);
      den = a * a + b * b + ab2 * std::cos(delta);
      logscale = 2.0 * mx;
      su = sv_u = a * a - b * b;
      cu = eta_hbar * ab2 * std::sin(delta);
      cv = -ab2 * std::sin(delta) / eta_hbar;
    } else {
      // Equal weights: divide through by 2 e^{R1+R2} and rescale cosh/sinh
      // by e^{-|r|} so large separations stay finite.
      const double r = f1.R - f2.R;
      const double e = std::exp(-std::abs(r));
      const double s = e * e;
      const double ch = 0.5 * (1.0 + s);
      const double sh = (r >= 0.0 ? 0.5 : -0.5) * (1.0 - s);
      const double d = f1.phase - f2.phase;
      logscale = f1.R + f2.R + std::abs(r);
      su = sv_u = sh;
      if (form_ == SuperpositionForm::EqualReal) {
        den = ch + std::cos(d) * e;
        cu = eta_hbar * std::sin(d) * e;
        cv = -std::sin(d) * e / eta_hbar;
      } else {
        den = ch + std::sin(d) * e;
        cu = -eta_hbar * std::cos(d) * e;
        cv = std::cos(d) * e / eta_hbar;
      }
    }
    // Principal-value phase measured from component 1.
    const double mag_ratio = std::exp(lb - la);
    const double phase = p1 + std::atan2(-mag_ratio * std::sin(delta), 1.0 + mag_ratio * std::cos(delta));
    if (!(den > 0.0)) return undefined_flow(phase);

    LocalFlow f;
    f.R = half_log_norm2_ + 0.5 * (logscale + std::log(den));
    f.phase = phase;
    for (int k = 0; k < 2; ++k) {
      const double du = f1.u[k] - f2.u[k];
      const double dv = f1.v[k] - f2.v[k];
      f.u[k] = 0.5 * (f1.u[k] + f2.u[k]) + 0.5 * (du * su + dv * cu) / den;
      f.v[k] = 0.5 * (f1.v[k] + f2.v[k]) + 0.5 * (dv * sv_u + du * cv) / den;
    }
    finish(f);
    return f;
  }

  std::array<cplx, 2> amplitude_gradient(const Point& p, double t) const override {
    const auto g1 = s1_.amplitude_gradient(p, t);
    const auto g2 = s2_.amplitude_gradient(p, t);
    const double n = std::sqrt(norm2_);
    return {n * (w1_ * g1[0] + w2_ * g2[0]), n * (w1_ * g1[1] + w2_ * g2[1])};
  }

  std::array<Extent, 2> support(double t) const override {
    return union_box(s1_.support(t), s2_.support(t));
  }

 private:
  // The other component (or its weight) vanishes here. Its gradient still
  // enters: grad psi / psi = L_live + w_node grad psi_node / (w_live psi_live).
  LocalFlow at_node(const Point& p, double t, LocalFlow f, double log_amp, double phase, cplx w_node,
                    const AnalyticState& node) const {
    if (!f.defined) return undefined_flow(phase);
    f.R = half_log_norm2_ + log_amp;
    f.phase = phase;
    if (w_node == 0.0) return f;
    const UnitsConfig& un = units();
    const auto g = node.amplitude_gradient(p, t);
    const cplx denom = std::polar(std::exp(log_amp), phase);  // w_live psi_live
    for (int k = 0; k < 2; ++k) {
      const cplx extra = w_node * g[k] / denom;
      f.u[k] -= (un.eta / un.mass) * extra.real();
      f.v[k] += (un.hbar / un.mass) * extra.imag();
    }
    finish(f);
    return f;
  }

  cplx compute_overlap() const {
    const auto box = union_box(s1_.support(0.0), s2_.support(0.0));
    const GridSpec g = s1_.dim() == 1 ? GridSpec::line(box[0].min, box[0].max, 4001)
                                      : GridSpec::plane(box[0], box[1], 501, 501);
    std::vector<cplx> prod(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.node(i);
      prod[i] = std::conj(s1_.amplitude(x, 0.0)) * s2_.amplitude(x, 0.0);
    }
    return integrate(g, std::span<const cplx>(prod));
  }

  AnalyticState s1_, s2_;
  cplx w1_, w2_;
  SuperpositionForm form_;
  cplx overlap_;
  double norm2_ = 1.0;
  double half_log_norm2_ = 0.0;
};

// ---------------------------------------------------------------------------

class HOSuperposition1D final : public StateImpl {
 public:
  HOSuperposition1D(double omega, const UnitsConfig& units) : omega_(omega), units_(units) {
    if (!(omega > 0.0)) throw DomainError("oscillator: omega must be positive");
    units_.validate();
    k_ = units_.mass * omega_ / units_.hbar;
    a_ = std::sqrt(2.0 * k_);
    log_pref_ = 0.5 * std::log(0.5 * std::sqrt(k_ / pi));
  }

  StateKind kind() const override { return StateKind::HOSuperposition1D; }
  int dim() const override { return 1; }
  const UnitsConfig& units() const override { return units_; }

  LocalFlow evaluate(const Point& p, double t) const override {
    const double x = p[0];
    const double z = a_ * x;
    const double wt = omega_ * t;
    const cplx rot = std::polar(1.0, -wt);
    const cplx f = 1.0 + z * rot;  // psi ~ f exp(-k x^2/2) exp(-i wt/2)
    // Continuous in t: beyond |z| = 1 the factor winds once per period.
    double phase;
    if (std::abs(z) <= 1.0) {
      phase = -0.5 * wt + std::atan2(-z * std::sin(wt), 1.0 + z * std::cos(wt));
    } else {
      phase = -1.5 * wt + (z < 0.0 ? pi : 0.0) + std::atan2(std::sin(wt) / z, 1.0 + std::cos(wt) / z);
    }
    if (std::abs(f) == 0.0) return undefined_flow(phase);
    const cplx dlog = -k_ * x + a_ * rot / f;
    LocalFlow out;
    out.R = log_pref_ - 0.5 * k_ * x * x + std::log(std::abs(f));
    out.phase = phase;
    out.u[0] = -(units_.eta / units_.mass) * dlog.real();
    out.v[0] = (units_.hbar / units_.mass) * dlog.imag();
    finish(out);
    return out;
  }

  std::array<Extent, 2> support(double) const override {
    const double w = (std::sqrt(3.0) + 10.0) / std::sqrt(k_);
    return {Extent{-w, w}, Extent{0.0, 0.0}};
  }

 private:
  double omega_;
  UnitsConfig units_;
  double k_ = 0.0;
  double a_ = 0.0;
  double log_pref_ = 0.0;
};

}  // namespace

double LocalFlow::density() const { return R == kNegInf ? 0.0 : std::exp(2.0 * R); }

cplx StateImpl::amplitude(const Point& x, double t) const {
  const LocalFlow f = evaluate(x, t);
  if (f.R == kNegInf) return 0.0;
  return std::polar(std::exp(f.R), f.phase);
}

std::array<cplx, 2> StateImpl::amplitude_gradient(const Point& x, double t) const {
  const LocalFlow f = evaluate(x, t);
  if (!f.defined) return {0.0, 0.0};
  const UnitsConfig& u = units();
  const cplx psi = std::polar(std::exp(f.R), f.phase);
  std::array<cplx, 2> g{};
  for (int k = 0; k < 2; ++k) g[k] = psi * cplx(-(u.mass / u.eta) * f.u[k], (u.mass / u.hbar) * f.v[k]);
  return g;
}

AnalyticState::AnalyticState(std::shared_ptr<const StateImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw DomainError("analytic state: null implementation");
}

StateKind AnalyticState::kind() const { return impl_->kind(); }
int AnalyticState::dim() const { return impl_->dim(); }
const UnitsConfig& AnalyticState::units() const { return impl_->units(); }
LocalFlow AnalyticState::evaluate(const Point& x, double t) const { return impl_->evaluate(x, t); }
cplx AnalyticState::amplitude(const Point& x, double t) const { return impl_->amplitude(x, t); }
std::array<cplx, 2> AnalyticState::amplitude_gradient(const Point& x, double t) const {
  return impl_->amplitude_gradient(x, t);
}
double AnalyticState::density(const Point& x, double t) const { return std::norm(amplitude(x, t)); }
std::array<Extent, 2> AnalyticState::support(double t) const { return impl_->support(t); }

double characteristic_time(double sigma0, const UnitsConfig& units) {
  units.validate();
  if (!(sigma0 > 0.0)) throw DomainError("free packet: sigma0 must be positive");
  return 2.0 * units.mass * sigma0 * sigma0 / units.hbar;
}

AnalyticState free_gaussian(double sigma0, const UnitsConfig& units, double center, double k0) {
  characteristic_time(sigma0, units);
  return AnalyticState(std::make_shared<FreeGaussian>(sigma0, units, center, k0));
}

AnalyticState ho_eigenstate(int n, double omega, const UnitsConfig& units) {
  return AnalyticState(std::make_shared<HOEigen1D>(n, omega, units));
}

AnalyticState ho_product_2d(int n, int m, double omega, const UnitsConfig& units) {
  return AnalyticState(std::make_shared<HOProduct2D>(n, m, omega, units));
}

AnalyticState superpose2_general(const AnalyticState& s1, const AnalyticState& s2, cplx w1, cplx w2) {
  return AnalyticState(std::make_shared<Superposition>(s1, s2, w1, w2, SuperpositionForm::General));
}

AnalyticState superpose2_equal_real(const AnalyticState& s1, const AnalyticState& s2) {
  const double w = 1.0 / std::sqrt(2.0);
  return AnalyticState(std::make_shared<Superposition>(s1, s2, w, w, SuperpositionForm::EqualReal));
}

AnalyticState superpose2_equal_imag(const AnalyticState& s1, const AnalyticState& s2) {
  const double w = 1.0 / std::sqrt(2.0);
  return AnalyticState(
      std::make_shared<Superposition>(s1, s2, w, cplx(0.0, w), SuperpositionForm::EqualImag));
}

AnalyticState ho_superposition_1d(double omega, const UnitsConfig& units) {
  return AnalyticState(std::make_shared<HOSuperposition1D>(omega, units));
}

SuperpositionInfo superposition_info(const AnalyticState& s) {
  const auto* sup = dynamic_cast<const Superposition*>(&s.impl());
  if (sup == nullptr) throw DomainError("superposition info requested for a non-superposition state");
  return sup->info();
}

WaveField sample_wavefield(const AnalyticState& s, const GridSpec& grid, double t) {
  grid.validate();
  if (grid.dim != s.dim()) throw ShapeError("sample: grid and state dimensions differ");
  WaveField psi{grid, std::vector<cplx>(grid.size()), t};
  for (std::size_t i = 0; i < grid.size(); ++i) psi.amplitude[i] = s.amplitude(grid.node(i), t);
  return psi;
}

VelocityFields analytic_fields(const AnalyticState& s, const GridSpec& grid, double t) {
  grid.validate();
  if (grid.dim != s.dim()) throw ShapeError("sample: grid and state dimensions differ");
  const std::size_t n = grid.size();
  VelocityFields f;
  f.grid = grid;
  f.rho.assign(n, 0.0);
  f.valid.assign(n, 0);
  for (auto* field : {&f.u, &f.b, &f.v, &f.flux_u, &f.flux_b, &f.flux_v}) {
    (*field)[0].assign(n, 0.0);
    (*field)[1].assign(n, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const LocalFlow lf = s.evaluate(grid.node(i), t);
    f.rho[i] = lf.density();
    f.valid[i] = lf.defined ? 1 : 0;
    for (int a = 0; a < 2; ++a) {
      f.u[a][i] = lf.u[a];
      f.v[a][i] = lf.v[a];
      f.b[a][i] = lf.b[a];
      f.flux_u[a][i] = f.rho[i] * lf.u[a];
      f.flux_b[a][i] = f.rho[i] * lf.b[a];
      f.flux_v[a][i] = f.rho[i] * lf.v[a];
    }
  }
  return f;
}

HermiteValue hermite(int n, double x) {
  if (n < 0) throw DomainError("hermite: negative order");
  HermiteValue h;
  if (n == 0) return h;
  double prev = 1.0;
  double cur = 2.0 * x;
  double log_scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      log_scale += 150.0 * std::log(10.0);
    }
  }
  h.hn = cur;
  h.hn_minus_1 = prev;
  h.log_scale = log_scale;
  return h;
}

}  // namespace edlab
