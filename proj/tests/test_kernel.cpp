#include <cmath>
#include <numbers>

#include "doctest.h"
#include "edlab/errors.hpp"
#include "edlab/kernel.hpp"

using namespace edlab;

namespace {

constexpr double pi = std::numbers::pi;

// Free packet written directly as a complex closed form (hbar = m = 1).
WaveField free_packet(const GridSpec& g, double sigma0, double t, double k0 = 0.0) {
  const double T = 2.0 * sigma0 * sigma0;
  WaveField psi{g, std::vector<cplx>(g.size()), t};
  const cplx s(1.0, t / T);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i)[0];
    const double y = x - k0 * t;
    psi.amplitude[i] = std::pow(2.0 * pi * sigma0 * sigma0, -0.25) / std::sqrt(s) *
                       std::exp(-y * y / (4.0 * sigma0 * sigma0 * s)) *
                       std::exp(cplx(0.0, k0 * x - 0.5 * k0 * k0 * t));
  }
  return psi;
}

WaveField ho_state(const GridSpec& g, int n) {
  WaveField psi{g, std::vector<cplx>(g.size()), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i)[0];
    const double h = n == 0 ? 1.0 : 2.0 * x;
    const double c = n == 0 ? 1.0 : 1.0 / std::sqrt(2.0);
    psi.amplitude[i] = c * std::pow(pi, -0.25) * h * std::exp(-0.5 * x * x);
  }
  return psi;
}

double rel_error(const std::vector<double>& got, const std::vector<double>& want,
                 const std::vector<double>& rho, const Mask& valid) {
  double rmax = 0.0;
  for (double r : rho) rmax = std::max(rmax, r);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (rho[i] <= 1e-6 * rmax) continue;
    REQUIRE(valid[i]);
    err = std::max(err, std::abs(got[i] - want[i]));
    ref = std::max(ref, std::abs(want[i]));
  }
  return ref > 0.0 ? err / ref : err;
}

}  // namespace

TEST_CASE("alpha and transition step") {
  UnitsConfig u;
  CHECK(alpha_from_timestep(u, 0.1) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(alpha_from_timestep({1.0, 2.0, 1.0}, 1.0) == 2.0);
  CHECK(alpha_from_timestep(u, 0.4) == doctest::Approx(alpha_from_timestep(u, 0.1) / 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(alpha_from_timestep(u, 0.0), DomainError);

  const auto z = transition_step({0.3, 0.0}, {0.0, 0.0}, 4.0);
  CHECK(z.mean[0] == 0.0);
  const auto s = transition_step({0.0, 0.0}, {2.0, -1.0}, 4.0);
  CHECK(s.mean[0] == 0.5);
  CHECK(s.mean[1] == -0.25);
  CHECK(s.covariance_scale == 0.25);
  const auto d = transition_step({0.0, 0.0}, {2.0, -1.0}, 8.0);
  CHECK(d.covariance_scale == s.covariance_scale / 2.0);
  CHECK(d.mean[0] == s.mean[0] / 2.0);
  CHECK_THROWS_AS(transition_step({0, 0}, {1, 1}, 0.0), DomainError);
}

TEST_CASE("decompose") {
  const auto g = GridSpec::line(-5, 5, 101);
  WaveField real{g, std::vector<cplx>(g.size(), cplx(0.2, 0.0)), 0.0};
  auto d = decompose(real);
  for (double p : d.phase) CHECK(p == 0.0);

  WaveField rot{g, std::vector<cplx>(g.size(), std::polar(1.0, 2.5)), 0.0};
  d = decompose(rot);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(d.R[i]) < 1e-15);
    CHECK(d.phase[i] == doctest::Approx(2.5).epsilon(1e-14));
  }

  // Phase of the free packet at t = T, unwrapped continuously.
  const auto wide = GridSpec::line(-14, 14, 1401);
  const auto psi = free_packet(wide, 1.0, 2.0);
  d = decompose(psi);
  const double st2 = 2.0;
  for (std::size_t i = 0; i < wide.size(); ++i) {
    if (!d.valid[i]) continue;
    const double x = wide.node(i)[0];
    const double want = x * x / (4.0 * st2) - std::atan(1.0) / 2.0;
    CHECK(std::abs(d.phase[i] - want) < 1e-6);
  }
  CHECK(d.masked > 0);

  WaveField zero{g, std::vector<cplx>(g.size()), 0.0};
  CHECK_THROWS_AS(decompose(zero), DegenerateFieldError);
  WaveField bad{g, std::vector<cplx>(3), 0.0};
  CHECK_THROWS_AS(decompose(bad), ShapeError);
}

TEST_CASE("velocities of the HO ground state") {
  const auto g = GridSpec::line(-10, 10, 1024);
  const auto f = velocities_from_wavefield(ho_state(g, 0), UnitsConfig{});
  std::vector<double> want_u(g.size()), want_b(g.size()), zero(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    want_u[i] = g.node(i)[0];
    want_b[i] = -g.node(i)[0];
  }
  CHECK(rel_error(f.u[0], want_u, f.rho, f.valid) < 1e-4);
  CHECK(rel_error(f.b[0], want_b, f.rho, f.valid) < 1e-4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f.v[0][i] == 0.0);
    CHECK(f.v[0][i] == doctest::Approx(f.b[0][i] + f.u[0][i]).epsilon(1e-10));
  }
}

TEST_CASE("free packet velocity laws on the sampled field") {
  const auto g = GridSpec::line(-20, 20, 2001);
  const double T = 2.0;
  for (double t : {0.0, 1.0, 2.0, 6.0}) {
    const auto f = velocities_from_wavefield(free_packet(g, 1.0, t), UnitsConfig{});
    std::vector<double> wu(g.size()), wv(g.size()), wb(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node(i)[0];
      wu[i] = x * T / (t * t + T * T);
      wv[i] = x * t / (t * t + T * T);
      wb[i] = x * (t - T) / (t * t + T * T);
    }
    CHECK(rel_error(f.u[0], wu, f.rho, f.valid) < 1e-4);
    if (t > 0.0) CHECK(rel_error(f.v[0], wv, f.rho, f.valid) < 1e-4);
    if (t == T) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (f.valid[i]) CHECK(std::abs(f.b[0][i]) < 1e-10);
      }
    } else {
      CHECK(rel_error(f.b[0], wb, f.rho, f.valid) < 1e-4);
    }
    if (t == 0.0) {
      for (double v : f.v[0]) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("momenta") {
  const auto g = GridSpec::line(-20, 20, 8001);
  const auto r0 = momenta(free_packet(g, 1.0, 0.0), UnitsConfig{});
  CHECK(std::abs(r0.mean_pq[0]) < 1e-14);
  CHECK(std::abs(r0.mean_po[0]) < 1e-8);

  for (double k0 : {0.5, 1.0, -2.0}) {
    const auto r = momenta(free_packet(g, 1.0, 1.0, k0), UnitsConfig{});
    CHECK(std::abs(r.mean_po[0]) < 1e-8);
    CHECK(std::abs(r.mean_pc[0] - r.mean_pq[0]) < 1e-8);
    CHECK(r.mean_pq[0] == doctest::Approx(k0).epsilon(1e-8));
    CHECK(std::abs(r.pq_imag[0]) < 1e-8);
  }

  auto psi = free_packet(g, 1.0, 0.0);
  for (auto& a : psi.amplitude) a *= 2.0;
  CHECK_THROWS_AS(momenta(psi, UnitsConfig{}), DomainError);
}

TEST_CASE("hamiltonian functional") {
  const auto g = GridSpec::line(-40, 40, 1024);
  std::vector<double> V(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) V[i] = 0.5 * g.node(i)[0] * g.node(i)[0];
  const auto e0 = hamiltonian_functional(ho_state(g, 0), V, UnitsConfig{});
  const auto e1 = hamiltonian_functional(ho_state(g, 1), V, UnitsConfig{});
  CHECK(std::abs(e0.total - 0.5) / 0.5 < 1e-3);
  CHECK(std::abs(e1.total - 1.5) / 1.5 < 1e-3);

  // Equal superposition: the oracle is the eigen-decomposition average.
  auto sup = ho_state(g, 0);
  const auto psi1 = ho_state(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    sup.amplitude[i] = (sup.amplitude[i] + psi1.amplitude[i]) / std::sqrt(2.0);
  }
  const auto es = hamiltonian_functional(sup, V, UnitsConfig{});
  CHECK(std::abs(es.total - 1.0) < 1e-3);

  auto shifted = sup;
  for (auto& a : shifted.amplitude) a *= std::polar(1.0, 0.7);
  CHECK(std::abs(hamiltonian_functional(shifted, V, UnitsConfig{}).total - es.total) < 1e-12);
}

TEST_CASE("continuity residual") {
  const auto g = GridSpec::line(-10, 10, 256);
  std::vector<double> rho(g.size(), 0.05);
  VectorField zero{std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
  auto r = continuity_residual(g, rho, rho, 1e-3, zero);
  CHECK(r.max == 0.0);
  CHECK(r.l2 == 0.0);

  // Uniform density with constant (divergence-free) flux.
  VectorField uniform{std::vector<double>(g.size(), 0.3), std::vector<double>(g.size(), 0.0)};
  r = continuity_residual(g, rho, rho, 1e-3, uniform);
  CHECK(r.max < 1e-14);

  CHECK_THROWS_AS(continuity_residual(g, rho, std::vector<double>(3), 1e-3, zero), ShapeError);

  // Analytic free-packet fields: residual shrinks about 4x when dx and dt halve.
  auto residual_at = [](std::size_t n, double dt) {
    const auto grid = GridSpec::line(-10, 10, n);
    const double T = 2.0;
    const double t = T;
    auto rho_at = [&](double x, double tt) {
      const double s2 = 1.0 + (tt / T) * (tt / T);
      return std::exp(-x * x / (2.0 * s2)) / std::sqrt(2.0 * pi * s2);
    };
    std::vector<double> before(grid.size()), after(grid.size());
    VectorField flux{std::vector<double>(grid.size()), std::vector<double>(grid.size(), 0.0)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i)[0];
      before[i] = rho_at(x, t - 0.5 * dt);
      after[i] = rho_at(x, t + 0.5 * dt);
      flux[0][i] = rho_at(x, t) * x * t / (t * t + T * T);
    }
    return continuity_residual(grid, before, after, dt, flux).max;
  };
  const double coarse = residual_at(201, 0.2);
  const double fine = residual_at(401, 0.1);
  CHECK(coarse / fine > 3.5);
}
