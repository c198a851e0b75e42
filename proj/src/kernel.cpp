#include "edlab/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "edlab/errors.hpp"

namespace edlab {
namespace {

void check_shape(const WaveField& psi) {
  psi.grid.validate();
  if (psi.amplitude.size() != psi.grid.size()) {
    throw ShapeError("wave field: amplitude count does not match grid");
  }
}

void check_normalized(const WaveField& psi) {
  const double n = norm(psi);
  if (std::abs(n - 1.0) > 1e-6) throw DomainError("wave field is not normalized");
}

VectorField zero_field(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }

// Unwraps one line starting at `centre` and walking to both ends.
void unwrap_line(std::vector<double>& phase, const Mask& valid, std::size_t start,
                 std::size_t stride, std::size_t n, std::size_t centre) {
  auto walk = [&](long step) {
    const std::size_t c = start + centre * stride;
    double ref = phase[c];
    bool have = valid[c] != 0;
    for (long k = static_cast<long>(centre) + step; k >= 0 && k < static_cast<long>(n); k += step) {
      const std::size_t idx = start + static_cast<std::size_t>(k) * stride;
      if (!valid[idx]) continue;
      if (have) phase[idx] = ref + wrap_angle(phase[idx] - ref);
      ref = phase[idx];
      have = true;
    }
  };
  walk(+1);
  walk(-1);
}

}  // namespace

double norm(const WaveField& psi) {
  check_shape(psi);
  std::vector<double> rho(psi.amplitude.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi.amplitude[i]);
  return integrate(psi.grid, rho);
}

void normalize(WaveField& psi) {
  const double n = norm(psi);
  if (!(n > 0.0)) throw DegenerateFieldError("normalize: zero wave field");
  const double s = 1.0 / std::sqrt(n);
  for (auto& a : psi.amplitude) a *= s;
}

Decomposition decompose(const WaveField& psi) {
  check_shape(psi);
  const std::size_t n = psi.amplitude.size();
  Decomposition d;
  d.R.assign(n, 0.0);
  d.phase.assign(n, 0.0);
  d.valid.assign(n, 0);
  double amax = 0.0;
  for (const auto& a : psi.amplitude) amax = std::max(amax, std::abs(a));
  if (!(amax > 0.0)) throw DegenerateFieldError("decompose: zero wave field");
  const double floor = kAmplitudeFloor * amax;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(psi.amplitude[i]);
    if (a >= floor) {
      d.R[i] = std::log(a);
      d.phase[i] = std::arg(psi.amplitude[i]);
      d.valid[i] = 1;
    } else {
      d.R[i] = std::log(floor);
      ++d.masked;
    }
  }
  const GridSpec& g = psi.grid;
  const std::size_t nx = g.points[0];
  if (g.dim == 1) {
    unwrap_line(d.phase, d.valid, 0, 1, nx, nx / 2);
  } else {
    const std::size_t ny = g.points[1];
    unwrap_line(d.phase, d.valid, ny / 2, ny, nx, nx / 2);
    for (std::size_t i = 0; i < nx; ++i) unwrap_line(d.phase, d.valid, i * ny, 1, ny, ny / 2);
  }
  return d;
}

VelocityFields velocities_from_wavefield(const WaveField& psi, const UnitsConfig& units) {
  units.validate();
  const Decomposition d = decompose(psi);
  const std::size_t n = psi.amplitude.size();
  VelocityFields f;
  f.grid = psi.grid;
  f.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.rho[i] = std::norm(psi.amplitude[i]);
  f.u = f.b = f.v = zero_field(n);
  f.flux_u = f.flux_b = f.flux_v = zero_field(n);
  f.valid = d.valid;

  const double cu = units.eta / units.mass;
  const double cv = units.hbar / units.mass;
  for (int axis = 0; axis < psi.grid.dim; ++axis) {
    Mask okR;
    Mask okP;
    const auto dR = derivative_masked(psi.grid, d.R, d.valid, axis, okR);
    const auto dP = phase_derivative(psi.grid, d.phase, d.valid, axis, okP);
    for (std::size_t i = 0; i < n; ++i) {
      f.valid[i] = f.valid[i] && okR[i] && okP[i];
      f.u[axis][i] = -cu * dR[i];
      f.v[axis][i] = cv * dP[i];
    }
  }
  std::size_t live = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.valid[i]) {
      for (int a = 0; a < 2; ++a) f.u[a][i] = f.v[a][i] = 0.0;
      continue;
    }
    ++live;
  }
  if (live == 0) throw DegenerateFieldError("velocities: every node is masked");
  for (int a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      f.b[a][i] = f.v[a][i] - f.u[a][i];
      f.flux_u[a][i] = f.rho[i] * f.u[a][i];
      f.flux_b[a][i] = f.rho[i] * f.b[a][i];
      f.flux_v[a][i] = f.rho[i] * f.v[a][i];
    }
  }
  return f;
}

double alpha_from_timestep(const UnitsConfig& units, double dt) {
  units.validate();
  if (!(dt > 0.0)) throw DomainError("alpha: time step must be positive");
  return units.mass / (units.eta * dt);
}

GaussianStep transition_step(const Point& /*x*/, const Vec2& drift_gradient, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("transition step: alpha must be positive");
  return {{drift_gradient[0] / alpha, drift_gradient[1] / alpha}, 1.0 / alpha};
}

MomentumReport momenta(const WaveField& psi, const UnitsConfig& units) {
  check_normalized(psi);
  const VelocityFields f = velocities_from_wavefield(psi, units);
  const std::size_t n = psi.amplitude.size();
  const auto w = quadrature_weights(psi.grid);
  const double m = units.mass;
  MomentumReport r;
  r.p_d = r.p_o = r.p_c = zero_field(n);
  std::vector<double> td(n), to(n), tc(n), tqr(n), tqi(n);
  for (int a = 0; a < psi.grid.dim; ++a) {
    const auto dpsi = derivative(psi.grid, std::span<const cplx>(psi.amplitude), a);
    for (std::size_t i = 0; i < n; ++i) {
      r.p_d[a][i] = m * f.b[a][i];
      r.p_o[a][i] = m * f.u[a][i];
      r.p_c[a][i] = m * f.v[a][i];
      td[i] = w[i] * f.rho[i] * r.p_d[a][i];
      to[i] = w[i] * f.rho[i] * r.p_o[a][i];
      tc[i] = w[i] * f.rho[i] * r.p_c[a][i];
      // psi* (-i hbar d psi)
      const cplx q = std::conj(psi.amplitude[i]) * cplx(0.0, -units.hbar) * dpsi[i];
      tqr[i] = w[i] * q.real();
      tqi[i] = w[i] * q.imag();
    }
    r.mean_pd[a] = pairwise_sum(td);
    r.mean_po[a] = pairwise_sum(to);
    r.mean_pc[a] = pairwise_sum(tc);
    r.mean_pq[a] = pairwise_sum(tqr);
    r.pq_imag[a] = pairwise_sum(tqi);
  }
  return r;
}

EnergyReport hamiltonian_functional(const WaveField& psi, const std::vector<double>& potential,
                                    const UnitsConfig& units) {
  units.validate();
  check_normalized(psi);
  if (potential.size() != psi.amplitude.size()) {
    throw ShapeError("hamiltonian: potential size does not match grid");
  }
  const std::size_t n = psi.amplitude.size();
  const auto w = quadrature_weights(psi.grid);
  double amax = 0.0;
  for (const auto& a : psi.amplitude) amax = std::max(amax, std::abs(a));
  const double floor = kAmplitudeFloor * amax;

  std::vector<double> kin(n, 0.0), fis(n, 0.0), pot(n, 0.0);
  EnergyReport e;
  for (std::size_t i = 0; i < n; ++i) pot[i] = w[i] * std::norm(psi.amplitude[i]) * potential[i];
  for (int a = 0; a < psi.grid.dim; ++a) {
    const auto dpsi = derivative(psi.grid, std::span<const cplx>(psi.amplitude), a);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(psi.amplitude[i]) < floor) {
        fis[i] += w[i] * 4.0 * units.xi() * std::norm(dpsi[i]) / units.mass;
        continue;
      }
      const double rho = std::norm(psi.amplitude[i]);
      const cplx j = std::conj(psi.amplitude[i]) * dpsi[i];  // rho (grad R + i grad phase)
      kin[i] += w[i] * units.hbar * units.hbar * j.imag() * j.imag() / (2.0 * units.mass * rho);
      fis[i] += w[i] * 4.0 * units.xi() * j.real() * j.real() / (units.mass * rho);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(psi.amplitude[i]) < floor) ++e.regularized_nodes;
  }
  e.kinetic = pairwise_sum(kin);
  e.fisher = pairwise_sum(fis);
  e.potential = pairwise_sum(pot);
  e.total = e.kinetic + e.fisher + e.potential;
  return e;
}

ResidualNorms continuity_residual(const GridSpec& grid, const std::vector<double>& rho_before,
                                  const std::vector<double>& rho_after, double dt,
                                  const VectorField& flux) {
  grid.validate();
  const std::size_t n = grid.size();
  if (rho_before.size() != n || rho_after.size() != n || flux[0].size() != n ||
      (grid.dim == 2 && flux[1].size() != n)) {
    throw ShapeError("continuity residual: grid mismatch");
  }
  if (!(dt > 0.0)) throw DomainError("continuity residual: dt must be positive");
  const auto div = divergence(grid, flux);
  std::vector<double> sq(n);
  ResidualNorms r;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = (rho_after[i] - rho_before[i]) / dt + div[i];
    r.max = std::max(r.max, std::abs(res));
    sq[i] = res * res;
  }
  r.l2 = std::sqrt(integrate(grid, sq));
  return r;
}

}  // namespace edlab
