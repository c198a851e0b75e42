#include "edlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edlab/errors.hpp"

namespace edlab {
namespace {

// Factorized tridiagonal system (M + i theta K) for one grid line, where
// M = tridiag(1, 10, 1)/12 and K = M H with a Numerov kinetic term.
struct LineSystem {
  std::vector<cplx> sub, diag, sup;  // LHS coefficients; the RHS uses their conjugates
  std::vector<cplx> cprime, inv_pivot;

  LineSystem(const std::vector<double>& V, double theta, double kin) {
    const std::size_t n = V.size();
    sub.resize(n);
    diag.resize(n);
    sup.resize(n);
    const cplx it(0.0, theta);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = 10.0 / 12.0 + it * (2.0 * kin + 10.0 * V[i] / 12.0);
      sub[i] = i > 0 ? 1.0 / 12.0 + it * (-kin + V[i - 1] / 12.0) : 0.0;
      sup[i] = i + 1 < n ? 1.0 / 12.0 + it * (-kin + V[i + 1] / 12.0) : 0.0;
    }
    cprime.resize(n);
    inv_pivot.resize(n);
    cplx pivot = diag[0];
    inv_pivot[0] = 1.0 / pivot;
    cprime[0] = sup[0] * inv_pivot[0];
    for (std::size_t i = 1; i < n; ++i) {
      pivot = diag[i] - sub[i] * cprime[i - 1];
      inv_pivot[i] = 1.0 / pivot;
      cprime[i] = sup[i] * inv_pivot[i];
    }
  }

  // In-place CN update of one line held contiguously in `x`.
  void apply(std::vector<cplx>& x, std::vector<cplx>& rhs) const {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      cplx r = std::conj(diag[i]) * x[i];
      if (i > 0) r += std::conj(sub[i]) * x[i - 1];
      if (i + 1 < n) r += std::conj(sup[i]) * x[i + 1];
      rhs[i] = r;
    }
    rhs[0] *= inv_pivot[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) * inv_pivot[i];
    x[n - 1] = rhs[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = rhs[i] - cprime[i] * x[i + 1];
  }
};

double plain_norm(const std::vector<cplx>& psi) {
  std::vector<double> r(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) r[i] = std::norm(psi[i]);
  return pairwise_sum(r);
}

}  // namespace

PotentialSpec PotentialSpec::harmonic(double omega) {
  if (!(omega > 0.0)) throw DomainError("potential: harmonic omega must be positive");
  PotentialSpec p;
  p.kind = Kind::Harmonic;
  p.omega = omega;
  return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> values) {
  PotentialSpec p;
  p.kind = Kind::Tabulated;
  p.table = std::move(values);
  return p;
}

void PotentialSpec::validate(const GridSpec& grid) const {
  if (kind == Kind::Harmonic && !(omega > 0.0)) throw DomainError("potential: harmonic omega must be positive");
  if (kind == Kind::Tabulated) {
    if (table.size() != grid.size()) throw ShapeError("potential: table size does not match grid");
    for (double v : table) {
      if (!std::isfinite(v)) throw DomainError("potential: non-finite table entry");
    }
  }
}

std::vector<double> PotentialSpec::sample(const GridSpec& grid, const UnitsConfig& units) const {
  validate(grid);
  std::vector<double> V(grid.size(), 0.0);
  if (kind == Kind::Tabulated) return table;
  if (kind == Kind::Harmonic) {
    const double k = 0.5 * units.mass * omega * omega;
    for (std::size_t i = 0; i < V.size(); ++i) {
      const Point p = grid.node(i);
      V[i] = k * (p[0] * p[0] + (grid.dim == 2 ? p[1] * p[1] : 0.0));
    }
  }
  return V;
}

struct SchrodingerStepper::Impl {
  GridSpec grid;
  // 1D: systems[0]. 2D separable: x sweep then y sweep share one system per
  // axis. 2D tabulated: one system per line.
  std::vector<LineSystem> xsys;  // x sweeps (dt/2 in 2D, dt in 1D)
  std::vector<LineSystem> ysys;  // y sweeps (dt)
  bool per_line = false;
};

SchrodingerStepper::SchrodingerStepper(const GridSpec& grid, const PotentialSpec& potential,
                                       const UnitsConfig& units, double dt)
    : impl_(std::make_unique<Impl>()) {
  grid.validate();
  units.validate();
  potential.validate(grid);
  if (!(dt > 0.0)) throw ConfigurationError("schrodinger: dt must be positive");
  impl_->grid = grid;
  const double c2 = units.hbar * units.hbar / (2.0 * units.mass);
  const double kx = c2 / (grid.spacing(0) * grid.spacing(0));
  const std::size_t nx = grid.points[0];
  const auto harmonic_axis = [&](int axis) {
    std::vector<double> v(grid.points[axis], 0.0);
    if (potential.kind == PotentialSpec::Kind::Harmonic) {
      const double k = 0.5 * units.mass * potential.omega * potential.omega;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid.coord(axis, i);
        v[i] = k * x * x;
      }
    }
    return v;
  };
  if (grid.dim == 1) {
    const std::vector<double> V = potential.sample(grid, units);
    impl_->xsys.emplace_back(V, dt / (2.0 * units.hbar), kx);
    return;
  }
  const std::size_t ny = grid.points[1];
  const double ky = c2 / (grid.spacing(1) * grid.spacing(1));
  const double theta_half = dt / (4.0 * units.hbar);
  const double theta_full = dt / (2.0 * units.hbar);
  if (potential.kind != PotentialSpec::Kind::Tabulated) {
    impl_->xsys.emplace_back(harmonic_axis(0), theta_half, kx);
    impl_->ysys.emplace_back(harmonic_axis(1), theta_full, ky);
    return;
  }
  impl_->per_line = true;
  std::vector<double> line;
  for (std::size_t j = 0; j < ny; ++j) {
    line.assign(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) line[i] = 0.5 * potential.table[grid.index(i, j)];
    impl_->xsys.emplace_back(line, theta_half, kx);
  }
  for (std::size_t i = 0; i < nx; ++i) {
    line.assign(ny, 0.0);
    for (std::size_t j = 0; j < ny; ++j) line[j] = 0.5 * potential.table[grid.index(i, j)];
    impl_->ysys.emplace_back(line, theta_full, ky);
  }
}

SchrodingerStepper::~SchrodingerStepper() = default;

void SchrodingerStepper::step(std::vector<cplx>& psi) const {
  const GridSpec& g = impl_->grid;
  if (psi.size() != g.size()) throw ShapeError("schrodinger: field size does not match grid");
  const std::size_t nx = g.points[0];
  if (g.dim == 1) {
    std::vector<cplx> rhs(nx);
    impl_->xsys[0].apply(psi, rhs);
    return;
  }
  const std::size_t ny = g.points[1];
  std::vector<cplx> line(nx), rhs(std::max(nx, ny));
  auto sweep_x = [&] {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) line[i] = psi[i * ny + j];
      rhs.resize(nx);
      impl_->xsys[impl_->per_line ? j : 0].apply(line, rhs);
      for (std::size_t i = 0; i < nx; ++i) psi[i * ny + j] = line[i];
    }
  };
  sweep_x();
  std::vector<cplx> col(ny);
  for (std::size_t i = 0; i < nx; ++i) {
    std::copy(psi.begin() + i * ny, psi.begin() + (i + 1) * ny, col.begin());
    rhs.resize(ny);
    impl_->ysys[impl_->per_line ? i : 0].apply(col, rhs);
    std::copy(col.begin(), col.end(), psi.begin() + i * ny);
  }
  sweep_x();
}

std::vector<WaveField> schrodinger_evolve(const WaveField& psi0, const PotentialSpec& potential,
                                          const UnitsConfig& units, double dt, std::size_t steps,
                                          const SchrodingerOptions& options) {
  if (psi0.amplitude.size() != psi0.grid.size()) throw ShapeError("schrodinger: field size does not match grid");
  if (options.record_stride == 0) throw ConfigurationError("schrodinger: record stride must be positive");
  const SchrodingerStepper stepper(psi0.grid, potential, units, dt);
  std::vector<WaveField> frames;
  frames.push_back(psi0);
  std::vector<cplx> psi = psi0.amplitude;
  double n_prev = plain_norm(psi);
  if (!(n_prev > 0.0)) throw DegenerateFieldError("schrodinger: zero initial field");
  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step(psi);
    const double n_now = plain_norm(psi);
    if (!(std::abs(n_now - n_prev) <= options.norm_tolerance * n_prev)) {
      std::ostringstream os;
      os << "schrodinger: norm drift " << std::abs(n_now - n_prev) / n_prev << " exceeds tolerance at step " << k;
      throw StabilityError(os.str(), k);
    }
    n_prev = n_now;
    if (k % options.record_stride == 0 || k == steps) {
      frames.push_back({psi0.grid, psi, psi0.time + static_cast<double>(k) * dt});
    }
  }
  return frames;
}

DensitySequence fokker_planck_evolve(const GridSpec& grid, const std::vector<double>& rho0,
                                     const DriftFunction& drift, const UnitsConfig& units, double dt,
                                     std::size_t steps, const FokkerPlanckOptions& options, double t0) {
  grid.validate();
  units.validate();
  if (grid.dim != 1) throw ConfigurationError("fokker-planck: only 1D grids are supported");
  if (rho0.size() != grid.size()) throw ShapeError("fokker-planck: density size does not match grid");
  if (!(dt > 0.0)) throw ConfigurationError("fokker-planck: dt must be positive");
  if (options.record_stride == 0) throw ConfigurationError("fokker-planck: record stride must be positive");
  const std::size_t n = grid.size();
  const double h = grid.spacing(0);
  const double D = units.eta / (2.0 * units.mass);
  const double r = D * dt / (h * h);
  if (r > 0.5) {
    std::ostringstream os;
    os << "fokker-planck: diffusion number D dt/dx^2 = " << r << " exceeds 0.5";
    throw ConfigurationError(os.str());
  }
  std::vector<double> faces(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) faces[i] = 0.5 * (grid.coord(0, i) + grid.coord(0, i + 1));

  // Every face drift is checked before the first step.
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    for (double xf : faces) {
      const double c = std::abs(drift(xf, t)) * dt / h;
      if (!(c <= 0.9) || c * c > 2.0 * r * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "fokker-planck: Courant number " << c << " at x = " << xf << ", t = " << t
           << " violates max|b| dt/dx <= 0.9 or (b dt/dx)^2 <= 2 D dt/dx^2";
        throw ConfigurationError(os.str());
      }
    }
  }

  DensitySequence out;
  auto mass_of = [&](const std::vector<double>& rho) { return pairwise_sum(rho) * h; };
  std::vector<double> rho = rho0;
  out.times.push_back(t0);
  out.rho.push_back(rho);
  out.mass.push_back(mass_of(rho));
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k - 1) * dt;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double b = drift(faces[i], t);
      flux[i + 1] = b * 0.5 * (rho[i] + rho[i + 1]) - D * (rho[i + 1] - rho[i]) / h;
    }
    if (options.absorbing) {
      // Ghost density zero just outside each end.
      const double bl = drift(grid.coord(0, 0) - 0.5 * h, t);
      const double br = drift(grid.coord(0, n - 1) + 0.5 * h, t);
      flux[0] = bl * 0.5 * rho[0] - D * rho[0] / h;
      flux[n] = br * 0.5 * rho[n - 1] + D * rho[n - 1] / h;
    } else {
      flux[0] = flux[n] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) rho[i] -= dt / h * (flux[i + 1] - flux[i]);
    if (k % options.record_stride == 0 || k == steps) {
      out.times.push_back(t0 + static_cast<double>(k) * dt);
      out.rho.push_back(rho);
      out.mass.push_back(mass_of(rho));
    }
  }
  return out;
}

}  // namespace edlab
