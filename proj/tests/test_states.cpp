#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "edlab/errors.hpp"
#include "edlab/states.hpp"

using namespace edlab;

namespace {

constexpr double pi = std::numbers::pi;

double grid_norm(const AnalyticState& s, const GridSpec& g, double t) {
  return norm(sample_wavefield(s, g, t));
}

// sup |numerical - closed form| / sup |closed form| over nodes with
// rho > 1e-6 max rho whose stencil is at least `guard` cells from any
// node where |psi| < node_floor * max |psi|.
struct GradientCheck {
  double u = 0.0;
  double v = 0.0;
};

GradientCheck gradient_oracle(const AnalyticState& s, const GridSpec& g, double t, double node_floor = 0.0,
                              int guard = 0) {
  const auto psi = sample_wavefield(s, g, t);
  const auto num = velocities_from_wavefield(psi, s.units());
  const auto ref = analytic_fields(s, g, t);
  double rmax = 0.0, amax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    rmax = std::max(rmax, ref.rho[i]);
    amax = std::max(amax, std::abs(psi.amplitude[i]));
  }
  std::vector<char> near(g.size(), 0);
  if (node_floor > 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(psi.amplitude[i]) >= node_floor * amax) continue;
      if (g.dim == 1) {
        for (int k = -guard; k <= guard; ++k) {
          const long j = static_cast<long>(i) + k;
          if (j >= 0 && j < static_cast<long>(g.size())) near[j] = 1;
        }
      } else {
        const long ny = static_cast<long>(g.points[1]);
        const long ix = static_cast<long>(i) / ny, iy = static_cast<long>(i) % ny;
        for (int a = -guard; a <= guard; ++a) {
          for (int b = -guard; b <= guard; ++b) {
            const long jx = ix + a, jy = iy + b;
            if (jx >= 0 && jy >= 0 && jx < static_cast<long>(g.points[0]) && jy < ny) near[jx * ny + jy] = 1;
          }
        }
      }
    }
  }
  double eu = 0, ru = 0, ev = 0, rv = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (ref.rho[i] <= 1e-6 * rmax || near[i]) continue;
    REQUIRE(num.valid[i]);
    for (int a = 0; a < g.dim; ++a) {
      eu = std::max(eu, std::abs(num.u[a][i] - ref.u[a][i]));
      ru = std::max(ru, std::abs(ref.u[a][i]));
      ev = std::max(ev, std::abs(num.v[a][i] - ref.v[a][i]));
      rv = std::max(rv, std::abs(ref.v[a][i]));
    }
  }
  return {ru > 0 ? eu / ru : eu, rv > 0 ? ev / rv : ev};
}

}  // namespace

TEST_CASE("free gaussian closed forms") {
  const UnitsConfig u;
  CHECK(characteristic_time(1.0, u) == 2.0);
  CHECK(characteristic_time(1.5, {1.0, 2.0, 1.0}) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(characteristic_time(0.0, u), DomainError);

  const auto s = free_gaussian(1.0, u);
  const double T = 2.0;
  // sigma_t^2 = 2 sigma0^2 at t = T: R(0) = -log(2 pi 2)/4.
  CHECK(s.evaluate({0.0, 0.0}, T).R == doctest::Approx(-0.25 * std::log(4.0 * pi)).epsilon(1e-15));
  for (double x : {-3.0, 0.0, 0.7, 5.0}) CHECK(s.evaluate({x, 0.0}, 0.0).phase == 0.0);

  const auto g = GridSpec::line(-60, 60, 6001);
  for (double t : {0.0, T, 5.0 * T}) CHECK(std::abs(grid_norm(s, g, t) - 1.0) < 1e-6);

  for (double x : {-4.0, -1.0, 0.5, 3.0}) {
    for (double t : {0.0, 0.5, T, 3.0, 40.0}) {
      const auto f = s.evaluate({x, 0.0}, t);
      const double d = t * t + T * T;
      CHECK(f.v[0] == doctest::Approx(x * t / d).epsilon(1e-14));
      CHECK(f.u[0] == doctest::Approx(x * T / d).epsilon(1e-14));
      CHECK(f.b[0] == doctest::Approx(x * (t - T) / d).epsilon(1e-12));
      CHECK(f.v[0] == doctest::Approx(f.b[0] + f.u[0]).epsilon(1e-14));
    }
    CHECK(s.evaluate({x, 0.0}, T).b[0] == 0.0);
    // Late times: b approaches x/t and u vanishes.
    const double late = 1e6;
    CHECK(s.evaluate({x, 0.0}, late).b[0] * late / x == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(s.evaluate({x, 0.0}, late).u[0]) < 1e-11);
  }
}

TEST_CASE("hermite recurrence") {
  const auto h3 = hermite(3, 0.5);
  CHECK(h3.hn == doctest::Approx(8 * 0.125 - 12 * 0.5).epsilon(1e-15));
  CHECK(h3.hn_minus_1 == doctest::Approx(4 * 0.25 - 2).epsilon(1e-15));
  const auto big = hermite(60, 30.0);
  CHECK(std::isfinite(big.hn));
  // H_60(30) ~ 60^60 leading term; compare logs.
  CHECK(std::log(std::abs(big.hn)) + big.log_scale == doctest::Approx(60 * std::log(60.0)).epsilon(1e-2));
  CHECK_THROWS_AS(ho_eigenstate(61, 1.0, UnitsConfig{}), DomainError);
  CHECK_NOTHROW(ho_eigenstate(60, 1.0, UnitsConfig{}));
}

TEST_CASE("oscillator eigenstates") {
  const UnitsConfig u;
  const auto g0 = ho_eigenstate(0, 1.0, u);
  for (double x : {-2.0, 0.0, 1.3}) {
    const auto f = g0.evaluate({x, 0.0}, 0.8);
    CHECK(f.density() == doctest::Approx(std::exp(-x * x) / std::sqrt(pi)).epsilon(1e-14));
    CHECK(f.phase == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(f.v[0] == 0.0);
    CHECK(f.u[0] == doctest::Approx(x).epsilon(1e-14));
    CHECK(f.b[0] == -f.u[0]);
  }
  const auto g1 = ho_eigenstate(1, 1.0, u);
  for (double x : {-2.0, 0.4, 1.3}) {
    const auto f = g1.evaluate({x, 0.0}, 0.8);
    CHECK(f.density() == doctest::Approx(2 * x * x * std::exp(-x * x) / std::sqrt(pi)).epsilon(1e-14));
    CHECK(wrap_angle(f.phase + 1.2 - (x < 0 ? pi : 0.0)) == doctest::Approx(0.0));
  }
  CHECK_FALSE(g1.evaluate({0.0, 0.0}, 0.0).defined);

  // Non-unit mass and omega: rho_0 = (m w / pi hbar)^{1/2} exp(-m w x^2/hbar).
  const UnitsConfig heavy{0.7, 2.0, 0.7};
  const auto gh = ho_eigenstate(0, 1.5, heavy);
  const double k = 2.0 * 1.5 / 0.7;
  CHECK(gh.density({0.4, 0.0}, 0.0) == doctest::Approx(std::sqrt(k / pi) * std::exp(-k * 0.16)).epsilon(1e-13));

  const auto grid = GridSpec::line(-20, 20, 4001);
  for (int n = 0; n <= 10; ++n) {
    const auto s = ho_eigenstate(n, 1.0, u);
    CHECK(std::abs(grid_norm(s, grid, 0.3) - 1.0) < 1e-6);
    for (double x : {-2.1, 0.33, 1.7}) {
      const auto f = s.evaluate({x, 0.0}, 1.0);
      CHECK(f.v[0] == 0.0);
      CHECK(f.u[0] == -f.b[0]);
    }
  }
}

TEST_CASE("gradient oracle over the catalog") {
  const UnitsConfig u;
  const auto g1 = GridSpec::line(-20, 20, 4001);
  for (double t : {0.0, 1.0, 2.0, 8.0}) {
    const auto c = gradient_oracle(free_gaussian(1.0, u, 0.5, 0.8), g1, t);
    CHECK(c.u < 1e-4);
    CHECK(c.v < 1e-4);
  }
  for (int n = 0; n <= 4; ++n) {
    const auto c = gradient_oracle(ho_eigenstate(n, 1.0, u), g1, 0.0, 0.1, 10);
    CHECK(c.u < 1e-4);
  }
  const auto hs = ho_superposition_1d(1.0, u);
  for (double t : {0.0, 0.9, 2.0}) {
    const auto c = gradient_oracle(hs, g1, t, 0.1, 3);
    CHECK(c.u < 1e-4);
    CHECK(c.v < 1e-4);
  }
  const auto g2 = GridSpec::square(-6, 6, 481);
  const auto rot = superpose2_equal_imag(ho_product_2d(0, 1, 1.0, u), ho_product_2d(1, 0, 1.0, u));
  const auto c = gradient_oracle(rot, g2, 0.3, 0.1, 10);
  CHECK(c.u < 1e-4);
  CHECK(c.v < 1e-4);
}

TEST_CASE("general superposition against the complex sum") {
  const UnitsConfig u;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), width(0.7, 1.3), kk(-1.0, 1.0),
      ph(-pi, pi), mag(0.3, 1.0);
  const auto g = GridSpec::line(-30, 30, 6001);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s1 = free_gaussian(width(rng), u, pos(rng), kk(rng));
    const auto s2 = free_gaussian(width(rng), u, pos(rng), kk(rng));
    const auto s = superpose2_general(s1, s2, std::polar(mag(rng), ph(rng)), std::polar(mag(rng), ph(rng)));
    for (double t : {0.0, 1.5}) {
      const double n = grid_norm(s, g, t);
      CHECK(std::abs(n - 1.0) < 1e-10);
      const auto c = gradient_oracle(s, g, t);
      CHECK(c.u < 1e-4);
      CHECK(c.v < 1e-4);
    }
  }
}

TEST_CASE("superposition identities") {
  const UnitsConfig u;
  const auto a = free_gaussian(1.0, u, -2.0);
  const auto b = free_gaussian(0.8, u, 1.5, 0.3);

  // Zero second weight gives component 1 exactly.
  const auto only = superpose2_general(a, b, 1.0, 0.0);
  for (double x : {-3.0, -1.0, 0.5}) {
    const auto f = only.evaluate({x, 0.0}, 1.0);
    const auto r = a.evaluate({x, 0.0}, 1.0);
    CHECK(f.u[0] == r.u[0]);
    CHECK(f.v[0] == r.v[0]);
    CHECK(f.density() == doctest::Approx(r.density()).epsilon(1e-14));
  }

  // Dominant weight: v approaches v1.
  const auto dom = superpose2_general(a, b, 1.0, 1e-6);
  CHECK(std::abs(dom.evaluate({-2.5, 0.0}, 1.0).v[0] - a.evaluate({-2.5, 0.0}, 1.0).v[0]) < 1e-5);

  // Exchange symmetry.
  const cplx w1 = std::polar(0.6, 0.4), w2 = std::polar(0.8, -1.1);
  const auto s12 = superpose2_general(a, b, w1, w2);
  const auto s21 = superpose2_general(b, a, w2, w1);
  for (double x = -5.0; x <= 5.0; x += 0.37) {
    for (double t : {0.0, 0.7, 3.0}) {
      const auto f = s12.evaluate({x, 0.0}, t);
      const auto h = s21.evaluate({x, 0.0}, t);
      CHECK(std::abs(f.density() - h.density()) <= 1e-12 * std::max(1.0, f.density()));
      CHECK(std::abs(f.u[0] - h.u[0]) <= 1e-12 * std::max(1.0, std::abs(f.u[0])));
      CHECK(std::abs(f.v[0] - h.v[0]) <= 1e-12 * std::max(1.0, std::abs(f.v[0])));
    }
  }

  // Equal-weight forms agree with the general evaluation.
  const double w = 1.0 / std::sqrt(2.0);
  const auto er = superpose2_equal_real(a, b);
  const auto gr = superpose2_general(a, b, w, w);
  const auto ei = superpose2_equal_imag(a, b);
  const auto gi = superpose2_general(a, b, w, cplx(0.0, w));
  for (double x = -5.0; x <= 5.0; x += 0.23) {
    for (double t : {0.0, 0.7, 3.0}) {
      for (auto [p, q] : {std::pair{er, gr}, std::pair{ei, gi}}) {
        const auto f = p.evaluate({x, 0.0}, t);
        const auto h = q.evaluate({x, 0.0}, t);
        CHECK(std::abs(f.density() - h.density()) <= 1e-12 * std::max(1.0, h.density()));
        CHECK(std::abs(f.u[0] - h.u[0]) <= 1e-12 * std::max(1.0, std::abs(h.u[0])));
        CHECK(std::abs(f.v[0] - h.v[0]) <= 1e-12 * std::max(1.0, std::abs(h.v[0])));
      }
    }
  }

  // Identical components.
  const auto same = superpose2_equal_real(a, a);
  for (double x : {-3.0, -2.0, 0.0}) {
    const auto f = same.evaluate({x, 0.0}, 1.2);
    const auto r = a.evaluate({x, 0.0}, 1.2);
    CHECK(f.density() == doctest::Approx(r.density()).epsilon(1e-12));
    CHECK(f.u[0] == doctest::Approx(r.u[0]).epsilon(1e-12));
    CHECK(f.v[0] == doctest::Approx(r.v[0]).epsilon(1e-12));
  }
  const auto info = superposition_info(same);
  CHECK(info.norm_factor == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(info.overlap.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(superposition_info(a), DomainError);

  // Symmetric slit pair: rho even in x.
  const auto pair = superpose2_equal_real(free_gaussian(1.0, u, -5.0), free_gaussian(1.0, u, 5.0));
  for (double x = 0.1; x < 20.0; x += 0.7) {
    CHECK(std::abs(pair.density({x, 0.0}, 24.0) - pair.density({-x, 0.0}, 24.0)) <= 1e-12);
  }

  CHECK_THROWS_AS(superpose2_general(a, ho_product_2d(0, 0, 1.0, u), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(superpose2_general(a, free_gaussian(1.0, {1.0, 2.0, 1.0}), 1.0, 1.0), DomainError);
}

TEST_CASE("oscillator superposition in closed form") {
  const UnitsConfig u;
  const auto s = ho_superposition_1d(1.0, u);
  const auto g = GridSpec::line(-20, 20, 4001);
  CHECK(std::abs(grid_norm(s, g, 0.0) - 1.0) < 1e-6);
  CHECK(std::abs(grid_norm(s, g, pi) - 1.0) < 1e-6);
  for (double x : {0.3, 1.0, 2.2}) CHECK(s.density({x, 0.0}, 0.0) > s.density({-x, 0.0}, 0.0));
  for (double x = -4.0; x <= 4.0; x += 0.31) {
    for (double t : {0.0, 0.4, 2.5}) {
      CHECK(std::abs(s.density({x, 0.0}, t + 2 * pi) - s.density({x, 0.0}, t)) < 1e-14);
      const double a = std::sqrt(2.0);
      const double want =
          0.5 / std::sqrt(pi) * std::exp(-x * x) * (1 + a * a * x * x + 2 * a * x * std::cos(t));
      CHECK(s.density({x, 0.0}, t) == doctest::Approx(want).epsilon(1e-13));
    }
  }

  // Same state assembled from eigenstates.
  const auto built = superpose2_equal_real(ho_eigenstate(0, 1.0, u), ho_eigenstate(1, 1.0, u));
  for (double x = -3.0; x <= 3.0; x += 0.29) {
    for (double t : {0.0, 1.1, 4.0}) {
      const auto f = s.evaluate({x, 0.0}, t);
      const auto h = built.evaluate({x, 0.0}, t);
      CHECK(f.density() == doctest::Approx(h.density()).epsilon(1e-10));
      CHECK(f.u[0] == doctest::Approx(h.u[0]).epsilon(1e-8));
      CHECK(f.v[0] == doctest::Approx(h.v[0]).epsilon(1e-8));
      CHECK(std::abs(wrap_angle(f.phase - h.phase)) < 1e-10);
    }
  }

  // Phase is continuous in t at fixed x, on both sides of |a x| = 1.
  for (double x : {0.2, 1.5, -1.5}) {
    double prev = s.evaluate({x, 0.0}, 0.0).phase;
    for (int k = 1; k <= 2000; ++k) {
      const double ph = s.evaluate({x, 0.0}, k * 4 * pi / 2000).phase;
      CHECK(std::abs(ph - prev) < 0.05);
      prev = ph;
    }
  }
}

TEST_CASE("rotating product superposition") {
  const UnitsConfig u;
  const auto s = superpose2_equal_imag(ho_product_2d(0, 1, 1.0, u), ho_product_2d(1, 0, 1.0, u));
  for (double x : {-1.2, 0.3, 2.0}) {
    for (double y : {-0.7, 0.9}) {
      const double r2 = x * x + y * y;
      const double want = std::exp(-r2) * r2 / pi;
      CHECK(s.density({x, y}, 0.0) == doctest::Approx(want).epsilon(1e-12));
      CHECK(s.density({x, y}, 1.7) == doctest::Approx(want).epsilon(1e-12));
      const auto f = s.evaluate({x, y}, 0.4);
      // Clockwise circulation with |v| r = hbar / m.
      CHECK(f.v[0] * y - f.v[1] * x == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(f.v[0] * x + f.v[1] * y) < 1e-12);
    }
  }
  CHECK_FALSE(s.evaluate({0.0, 0.0}, 0.0).defined);
}
