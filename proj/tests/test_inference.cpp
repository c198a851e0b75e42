#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "edlab/errors.hpp"
#include "edlab/inference.hpp"

using namespace edlab;
using namespace edlab::inference;

namespace {

Distribution random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng);
  return Distribution::normalized(w);
}

std::vector<double> die_faces() { return {1, 2, 3, 4, 5, 6}; }

}  // namespace

TEST_CASE("distribution invariants") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), DomainError);
  CHECK_THROWS_AS(Distribution(std::vector<double>{}), DomainError);
  CHECK_NOTHROW(Distribution({0.25, 0.75}, {"a", "b"}));
  CHECK_THROWS_AS(Distribution({0.25, 0.75}, {"a"}), DomainError);
}

TEST_CASE("product and sum rules") {
  CHECK(product_rule(1.0, 0.37) == 0.37);
  CHECK(product_rule(0.0, 0.37) == 0.0);
  CHECK(product_rule(0.5, 0.4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(product_rule(1.2, 0.5), DomainError);
  CHECK_THROWS_AS(product_rule(0.5, -0.1), DomainError);

  CHECK(sum_rule(0.3, 0.7, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sum_rule(0.3, 0.3, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(sum_rule(0.5, 0.4, 0.1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(sum_rule(0.3, 0.2, 0.25), InconsistencyError);
  CHECK_THROWS_AS(sum_rule(0.9, 0.8, 0.1), InconsistencyError);
}

TEST_CASE("bayes worked examples") {
  // Blue eyes given German: P(B|G) = 0.53, P(G) = 0.0114, P(B) = 0.08. The
  // non-German likelihood is fixed by total probability.
  const double pg = 0.0114;
  const double pb_g = 0.53;
  const double pb = 0.08;
  const double pb_ng = (pb - pb_g * pg) / (1.0 - pg);
  const auto german = bayes_update(Distribution({pg, 1.0 - pg}), ConditionalTable({{pb_g, pb_ng}, {1 - pb_g, 1 - pb_ng}}), 0);
  CHECK(german.evidence_probability == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(german.posterior[0] == doctest::Approx(0.0114 * 0.53 / 0.08).epsilon(1e-12));
  CHECK(std::abs(german.posterior[0] - 0.075) <= 1e-3);

  const auto disease = bayes_update(Distribution({0.0005, 0.9995}), ConditionalTable({{0.99, 0.01}, {0.01, 0.99}}), 0);
  CHECK(disease.evidence_probability == doctest::Approx(0.010490).epsilon(1e-9));
  CHECK(std::round(disease.posterior[0] * 1000.0) / 1000.0 == doctest::Approx(0.047).epsilon(1e-12));
}

TEST_CASE("bayes edge cases") {
  const auto uniform = Distribution::uniform(4);
  const auto flat = bayes_update(uniform, ConditionalTable({{0.3, 0.3, 0.3, 0.3}}), 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(flat.posterior[i] == doctest::Approx(0.25).epsilon(1e-15));

  // Evidence that singles out hypothesis 2.
  const auto certain = bayes_update(uniform, ConditionalTable({{0, 0, 1, 0}}), 0);
  CHECK(certain.posterior[2] == 1.0);

  CHECK_THROWS_AS(bayes_update(Distribution({1.0, 0.0}), ConditionalTable({{0.0, 0.5}}), 0),
                  UndefinedPosteriorError);
  CHECK_THROWS_AS(bayes_update(uniform, ConditionalTable({{0.5, 0.5}}), 0), DomainError);
}

TEST_CASE("shannon entropy") {
  for (std::size_t n : {1u, 2u, 5u, 17u}) {
    CHECK(shannon_entropy(Distribution::uniform(n)) == doctest::Approx(std::log(double(n))).epsilon(1e-14));
  }
  CHECK(shannon_entropy(Distribution::delta(5, 3)) == 0.0);
  CHECK(shannon_entropy(Distribution({0.25, 0.75})) == doctest::Approx(0.5623351446188083).epsilon(1e-14));
  CHECK(shannon_entropy(Distribution({0.25, 0.75}), 2.0) ==
        doctest::Approx(2.0 * 0.5623351446188083).epsilon(1e-14));
  // Entropy of uniform distributions grows with n.
  for (std::size_t n = 1; n < 20; ++n) {
    CHECK(shannon_entropy(Distribution::uniform(n + 1)) > shannon_entropy(Distribution::uniform(n)));
  }
}

TEST_CASE("grouping property") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 12;
    const auto p = random_distribution(rng, n);
    std::vector<std::size_t> group(n);
    const std::size_t ngroups = 1 + rng() % n;
    for (auto& g : group) g = rng() % ngroups;
    std::vector<double> pg(ngroups, 0.0);
    for (std::size_t i = 0; i < n; ++i) pg[group[i]] += p[i];
    std::vector<double> used;
    double inner = 0.0;
    for (std::size_t g = 0; g < ngroups; ++g) {
      if (pg[g] == 0.0) continue;
      used.push_back(pg[g]);
      std::vector<double> cond;
      for (std::size_t i = 0; i < n; ++i) {
        if (group[i] == g) cond.push_back(p[i] / pg[g]);
      }
      inner += pg[g] * shannon_entropy(Distribution::normalized(cond));
    }
    const double lhs = shannon_entropy(p);
    const double rhs = shannon_entropy(Distribution::normalized(used)) + inner;
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("relative entropy") {
  std::mt19937_64 rng(5);
  const auto p = random_distribution(rng, 7);
  CHECK(std::abs(relative_entropy(p, p)) < 1e-12);
  CHECK(relative_entropy(p, Distribution::uniform(7)) ==
        doctest::Approx(std::log(7.0) - shannon_entropy(p)).epsilon(1e-12));
  CHECK(relative_entropy(Distribution({1.0, 0.0}), Distribution({0.5, 0.5})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(relative_entropy(Distribution({0.5, 0.5}), Distribution({1.0, 0.0})), DomainError);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_distribution(rng, 5);
    const auto b = random_distribution(rng, 5);
    CHECK(relative_entropy(a, b) > 0.0);
  }
}

TEST_CASE("maxent trivial cases") {
  const auto q = Distribution::uniform(6);
  const auto same = maxent_solve(q, {});
  CHECK(same.distribution.weights() == q.weights());

  const auto fair = maxent_solve(q, {{die_faces(), 3.5}});
  for (std::size_t i = 0; i < 6; ++i) CHECK(fair.distribution[i] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  CHECK_THROWS_AS(maxent_solve(q, {{die_faces(), 6.5}}), InfeasibleError);
  CHECK_THROWS_AS(maxent_solve(q, {{die_faces(), 1.0}}), InfeasibleError);
  CHECK_THROWS_AS(maxent_solve(q, {{{1, 2}, 1.5}}), DomainError);
}

TEST_CASE("maxent matches a lambda scan") {
  // Independent oracle: scan lambda on [-5, 5] with step 1e-6 for the mean
  // closest to 4.5, then refine by bisection between neighbouring samples.
  const auto f = die_faces();
  auto mean_at = [&](double lam) {
    double z = 0.0, m = 0.0;
    for (double x : f) {
      const double w = std::exp(-lam * x);
      z += w;
      m += w * x;
    }
    return m / z;
  };
  double best = -5.0;
  double best_err = 1e300;
  const long steps = 10'000'000;
  for (long k = 0; k <= steps; ++k) {
    const double lam = -5.0 + 1e-6 * static_cast<double>(k);
    const double err = std::abs(mean_at(lam) - 4.5);
    if (err < best_err) {
      best_err = err;
      best = lam;
    }
  }
  double lo = best - 1e-6, hi = best + 1e-6;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) > 4.5 ? lo : hi) = mid;  // mean decreases with lambda
  }
  const double lam_oracle = 0.5 * (lo + hi);

  const auto r = maxent_solve(Distribution::uniform(6), {{f, 4.5}});
  REQUIRE(r.multipliers.size() == 1);
  CHECK(std::abs(r.multipliers[0] - lam_oracle) < 1e-6);
  CHECK(std::abs(r.multipliers[0] - best) < 1e-6);
  double achieved = 0.0;
  for (std::size_t i = 0; i < 6; ++i) achieved += r.distribution[i] * f[i];
  CHECK(std::abs(achieved - 4.5) < 1e-10);
  CHECK(r.residual < 1e-10);
}

TEST_CASE("maxent optimality against feasible perturbations") {
  std::mt19937_64 rng(2024);
  const auto q = random_distribution(rng, 6);
  const std::vector<double> f1 = die_faces();
  const std::vector<double> f2 = {1, 4, 9, 16, 25, 36};
  const auto r = maxent_solve(q, {{f1, 3.0}, {f2, 12.0}});
  const auto& p = r.distribution;
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    m1 += p[i] * f1[i];
    m2 += p[i] * f2[i];
  }
  CHECK(std::abs(m1 - 3.0) < 1e-10);
  CHECK(std::abs(m2 - 12.0) < 1e-10);

  // Null space of {1, f1, f2} by Gram-Schmidt on random directions.
  const std::vector<std::vector<double>> rows = {{1, 1, 1, 1, 1, 1}, f1, f2};
  std::vector<std::vector<double>> basis;
  for (const auto& row : rows) {
    auto v = row;
    for (const auto& b : basis) {
      const double d = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
      for (std::size_t i = 0; i < 6; ++i) v[i] -= d * b[i];
    }
    const double nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (auto& x : v) x /= nv;
    basis.push_back(v);
  }
  const double k_opt = relative_entropy(p, q);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> scale(0.0, 0.2);
  int accepted = 0;
  while (accepted < 10000) {
    std::vector<double> d(6);
    for (auto& x : d) x = gauss(rng);
    for (const auto& b : basis) {
      const double c = std::inner_product(d.begin(), d.end(), b.begin(), 0.0);
      for (std::size_t i = 0; i < 6; ++i) d[i] -= c * b[i];
    }
    const double s = scale(rng);
    std::vector<double> cand(6);
    bool ok = true;
    for (std::size_t i = 0; i < 6; ++i) {
      cand[i] = p[i] + s * d[i];
      if (cand[i] < 0.0) ok = false;
    }
    if (!ok) continue;  // rejection: leave the simplex
    ++accepted;
    double total = 0.0;
    for (double x : cand) total += x;
    for (auto& x : cand) x /= total;
    CHECK(relative_entropy(Distribution(cand), q) - k_opt >= -1e-9);
  }
}

TEST_CASE("slit decomposition demo") {
  std::vector<std::vector<double>> all_a = {{0.1, 0.2, 0.3, 0.4}, {0, 0, 0, 0}};
  CHECK(slit_decomposition_demo(all_a) == all_a[0]);

  std::vector<std::vector<double>> sym = {{0.1, 0.15, 0.25}, {0.25, 0.15, 0.1}};
  const auto t = slit_decomposition_demo(sym);
  CHECK(t.front() == doctest::Approx(t.back()));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> joint(2, std::vector<double>(8));
  double total = 0;
  for (auto& row : joint) {
    for (auto& x : row) total += (x = u(rng));
  }
  for (auto& row : joint) {
    for (auto& x : row) x /= total;
  }
  const auto col = slit_decomposition_demo(joint);
  double sum = 0;
  for (std::size_t x = 0; x < 8; ++x) {
    CHECK(col[x] == joint[0][x] + joint[1][x]);
    sum += col[x];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(slit_decomposition_demo({{0.5}}), DomainError);
}
