#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "edlab/errors.hpp"
#include "edlab/sampler.hpp"
#include "edlab/states.hpp"
#include "edlab/stats.hpp"

using namespace edlab;

namespace {

// Constant-amplitude field: u = v = 0, hence zero drift.
DriftSource zero_drift(double half_width) {
  const GridSpec g = GridSpec::line(-half_width, half_width, 64);
  WaveField a{g, std::vector<cplx>(g.size(), cplx(1.0, 0.0)), 0.0};
  WaveField b = a;
  b.time = 100.0;
  return DriftSource::frames({a, b}, {});
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("Kolmogorov distribution and two-sample statistic") {
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
  CHECK(kolmogorov_q(0.0) == 1.0);
  const auto r = ks_two_sample({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  CHECK(r.statistic == 1.0);
  CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}).statistic == 0.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  std::vector<double> a(20000), b(20000), c(20000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n01(rng);
    b[i] = n01(rng);
    c[i] = n01(rng) + 0.1;
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), DomainError);
}

TEST_CASE("density draws follow the density") {
  const GridSpec g = GridSpec::line(-8.0, 8.0, 1601);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    rho[i] = std::exp(-0.5 * (x - 1.0) * (x - 1.0));
  }
  const auto pts = draw_from_density(g, rho, 50000, 11);
  std::vector<double> xs, ref(50000);
  for (const auto& p : pts) xs.push_back(p[0]);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(1.0, 1.0);
  for (double& r : ref) r = n01(rng);
  CHECK(ks_two_sample(xs, ref).p_value > 0.01);
  CHECK_THROWS_AS(draw_from_density(g, std::vector<double>(g.size(), 0.0), 10, 1), DegenerateFieldError);
}

TEST_CASE("one-step displacement moments at a fixed start") {
  const UnitsConfig u{1.0, 1.0, 1.0};
  const AnalyticState s = free_gaussian(1.0, u);
  const Point x0{0.8, 0.0};
  SampleOptions o;
  o.particles = 100000;
  o.dt = 0.01;
  o.steps = 1;
  o.seed = 2024;
  o.start_point = x0;
  const auto e = sample_trajectories(DriftSource::analytic(s), o);
  std::vector<double> dx;
  for (std::size_t p = 0; p < e.particles; ++p) dx.push_back(e.position(1, p, 0) - e.position(0, p, 0));
  const double b = s.drift(x0, 0.0)[0];
  CHECK(b == doctest::Approx(-0.4).epsilon(1e-12));
  const double se = std::sqrt(var(dx) / static_cast<double>(dx.size()));
  CHECK(std::abs(mean(dx) - b * o.dt) < 4.0 * se);
  CHECK(std::abs(var(dx) - o.dt) / o.dt < 0.02);
}

TEST_CASE("zero drift delta start spreads as Brownian motion") {
  SampleOptions o;
  o.particles = 100000;
  o.dt = 0.01;
  o.steps = 100;
  o.start_point = Point{0.0, 0.0};
  o.start_grid = GridSpec::line(-50.0, 50.0, 64);
  const auto e = sample_trajectories(zero_drift(50.0), o);
  CHECK(e.reflections == 0);
  CHECK(std::abs(var(e.coordinates(1, 0)) - 1.0) < 0.02);
}

TEST_CASE("ensembles are reproducible and independent of the thread count") {
  const AnalyticState s = ho_eigenstate(0, 1.0, {});
  SampleOptions o;
  o.particles = 10000;
  o.dt = 0.01;
  o.steps = 20;
  o.seed = 99;
  const auto a = sample_trajectories(DriftSource::analytic(s), o);
  const auto b = sample_trajectories(DriftSource::analytic(s), o);
  o.threads = 3;
  const auto c = sample_trajectories(DriftSource::analytic(s), o);
  CHECK(a.positions == b.positions);
  CHECK(a.positions == c.positions);
  REQUIRE(a.chunk_seeds.size() == 3);
  CHECK(a.chunk_seeds[0] == 99);
  CHECK(a.chunk_seeds[2] == (99ULL ^ (2ULL * kChunkSeedStride)));
  o.seed = 100;
  const auto d = sample_trajectories(DriftSource::analytic(s), o);
  CHECK(a.positions != d.positions);
}

TEST_CASE("boundary handling is counted") {
  SampleOptions o;
  o.particles = 2000;
  o.dt = 0.01;
  o.steps = 400;
  o.start_grid = GridSpec::line(-1.0, 1.0, 64);
  const auto r = sample_trajectories(zero_drift(1.0), o);
  CHECK(r.reflections > 0);
  CHECK(r.absorbed == 0);
  for (double x : r.coordinates(1, 0)) CHECK((x >= -1.0 && x <= 1.0));
  o.absorbing = true;
  const auto a = sample_trajectories(zero_drift(1.0), o);
  CHECK(a.absorbed > 0);
  CHECK(a.reflections == 0);
  CHECK(a.coordinates(1, 0).size() == o.particles - a.absorbed);
}

TEST_CASE("free packet ensemble reproduces the spreading law") {
  const UnitsConfig u;
  const AnalyticState s = free_gaussian(1.0, u);
  SampleOptions o;
  o.particles = 20000;
  o.dt = 2e-3;
  o.steps = 1000;
  o.seed = 5;
  const auto e = sample_trajectories(DriftSource::analytic(s), o);
  const auto xs = e.coordinates(1, 0);
  CHECK(std::abs(var(xs) - 2.0) / 2.0 < 0.03);
  const GridSpec g = GridSpec::line(-15.0, 15.0, 3001);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rho[i] = s.density(g.node(i), 2.0);
  std::vector<double> ref;
  for (const auto& p : draw_from_density(g, rho, 20000, 77)) ref.push_back(p[0]);
  const auto ks = ks_two_sample(xs, ref);
  MESSAGE("KS D = " << ks.statistic << ", p = " << ks.p_value);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("drift estimates") {
  const UnitsConfig u;
  SUBCASE("oscillator ground state: forward estimate is b = -omega x") {
    const AnalyticState s = ho_eigenstate(0, 1.0, u);
    SampleOptions o;
    o.particles = 100000;
    o.dt = 0.01;
    o.steps = 3;
    o.record_steps = {0, 1, 2, 3};
    const auto e = sample_trajectories(DriftSource::analytic(s), o);
    const GridSpec bins = GridSpec::line(-2.0, 2.0, 17);
    const auto d = estimate_drifts(e, bins, 1);
    std::size_t used = 0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (!d.valid[i]) continue;
      ++used;
      const double x = bins.coord(0, i);
      CHECK(std::abs(d.forward[0][i] + x) < 4.5 * d.forward_se[0][i]);
    }
    CHECK(used == bins.size());
  }
  SUBCASE("pure diffusion: forward estimate vanishes") {
    SampleOptions o;
    o.particles = 50000;
    o.dt = 0.01;
    o.steps = 2;
    o.record_steps = {0, 1, 2};
    o.start_grid = GridSpec::line(-3.0, 3.0, 64);
    const auto e = sample_trajectories(zero_drift(3.0), o);
    const GridSpec bins = GridSpec::line(-2.5, 2.5, 21);
    const auto d = estimate_drifts(e, bins, 1);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      REQUIRE(d.valid[i]);
      CHECK(std::abs(d.forward[0][i]) < 4.5 * d.forward_se[0][i]);
    }
  }
  SUBCASE("free packet: forward and backward drifts differ where u is nonzero") {
    const AnalyticState s = free_gaussian(1.0, u);
    SampleOptions o;
    o.particles = 100000;
    o.dt = 0.02;
    o.steps = 51;
    o.record_steps = {49, 50, 51};
    const auto e = sample_trajectories(DriftSource::analytic(s), o);
    const GridSpec bins = GridSpec::line(-2.0, 2.0, 17);
    const auto d = estimate_drifts(e, bins, 1);
    std::size_t tested = 0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double x = bins.coord(0, i);
      if (!d.valid[i] || std::abs(x) < 0.7) continue;
      ++tested;
      const double pooled = std::hypot(d.forward_se[0][i], d.backward_se[0][i]);
      CHECK(std::abs(d.forward[0][i] - d.backward[0][i]) > 5.0 * pooled);
      // Backward drift b* = b + 2u.
      const LocalFlow f = s.evaluate({x, 0.0}, 1.0);
      CHECK(std::abs(d.forward[0][i] - f.b[0]) < 4.5 * d.forward_se[0][i]);
      CHECK(std::abs(d.backward[0][i] - (f.b[0] + 2.0 * f.u[0])) < 4.5 * d.backward_se[0][i] + 0.05);
    }
    CHECK(tested >= 8);
  }
  SUBCASE("empty and malformed inputs") {
    TrajectoryEnsemble empty;
    CHECK_THROWS_AS(estimate_drifts(empty, GridSpec::line(-1.0, 1.0, 16), 1), DomainError);
    SampleOptions o;
    o.particles = 100;
    o.steps = 4;
    const auto e = sample_trajectories(DriftSource::analytic(ho_eigenstate(0, 1.0, u)), o);
    CHECK_THROWS_AS(estimate_drifts(e, GridSpec::line(-1.0, 1.0, 16), 1), DomainError);
  }
}

TEST_CASE("frame-sequence drift matches the analytic drift") {
  const UnitsConfig u;
  const AnalyticState s = free_gaussian(1.0, u, 0.0, 0.5);
  const GridSpec g = GridSpec::line(-12.0, 14.0, 1301);
  const auto src = DriftSource::frames({sample_wavefield(s, g, 0.0), sample_wavefield(s, g, 0.5)}, u);
  for (double x : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
    for (double t : {0.0, 0.5}) CHECK(src.drift({x, 0.0}, t)[0] == doctest::Approx(s.drift({x, 0.0}, t)[0]).epsilon(1e-3));
  }
  const double mid = src.drift({1.0, 0.0}, 0.25)[0];
  CHECK(mid == doctest::Approx(0.5 * (s.drift({1.0, 0.0}, 0.0)[0] + s.drift({1.0, 0.0}, 0.5)[0])).epsilon(1e-3));
  CHECK_THROWS_AS(src.density(g, 0.3), DomainError);
}
