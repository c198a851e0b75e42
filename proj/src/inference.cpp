#include "edlab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edlab/errors.hpp"
#include "edlab/numerics.hpp"

namespace edlab::inference {
namespace {

constexpr double kSumTolerance = 1e-12;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << p << " is outside [0, 1]";
    throw DomainError(os.str());
  }
}

// Solves the small dense system a x = b by Gaussian elimination with
// partial pivoting. Returns false when a pivot vanishes.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return true;
}

struct DualState {
  double value;                        // log Z + lambda . target
  std::vector<double> p;               // current primal distribution
  std::vector<double> gradient;        // target - <f>
  std::vector<std::vector<double>> hessian;  // Cov_p(f)
};

DualState evaluate_dual(const std::vector<double>& q, const std::vector<MomentConstraint>& cons,
                        const std::vector<double>& lambda) {
  const std::size_t n = q.size();
  const std::size_t k = cons.size();
  std::vector<double> logw(n, -std::numeric_limits<double>::infinity());
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] <= 0.0) continue;
    double e = std::log(q[i]);
    for (std::size_t c = 0; c < k; ++c) e -= lambda[c] * cons[c].feature[i];
    logw[i] = e;
    shift = std::max(shift, e);
  }
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] > 0.0) w[i] = std::exp(logw[i] - shift);
  }
  const double z = pairwise_sum(w);
  DualState s;
  s.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.p[i] = w[i] / z;
  s.value = shift + std::log(z);
  std::vector<double> mean(k, 0.0);
  std::vector<double> terms(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) terms[i] = s.p[i] * cons[c].feature[i];
    mean[c] = pairwise_sum(terms);
    s.value += lambda[c] * cons[c].target;
  }
  s.gradient.resize(k);
  for (std::size_t c = 0; c < k; ++c) s.gradient[c] = cons[c].target - mean[c];
  s.hessian.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        terms[i] = s.p[i] * (cons[a].feature[i] - mean[a]) * (cons[b].feature[i] - mean[b]);
      }
      s.hessian[a][b] = s.hessian[b][a] = pairwise_sum(terms);
    }
  }
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Distribution::Distribution(std::vector<double> weights, std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  if (weights_.empty()) throw DomainError("distribution: no outcomes");
  if (!labels_.empty() && labels_.size() != weights_.size()) {
    throw DomainError("distribution: label count differs from weight count");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("distribution: negative or non-finite weight");
  }
  const double total = pairwise_sum(weights_);
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "distribution: weights sum to " << total << ", not 1";
    throw DomainError(os.str());
  }
}

Distribution Distribution::normalized(std::vector<double> weights, std::vector<std::string> labels) {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("distribution: negative or non-finite weight");
  }
  const double total = pairwise_sum(weights);
  if (!(total > 0.0)) throw DomainError("distribution: weights sum to zero");
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights), std::move(labels));
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw DomainError("distribution: no outcomes");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::delta(std::size_t n, std::size_t at) {
  if (at >= n) throw DomainError("distribution: delta index out of range");
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return Distribution(std::move(w));
}

ConditionalTable::ConditionalTable(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw DomainError("likelihood: empty table");
  const std::size_t width = rows_.front().size();
  for (const auto& row : rows_) {
    if (row.size() != width || width == 0) throw DomainError("likelihood: ragged or empty rows");
    for (double v : row) check_probability(v, "likelihood entry");
  }
}

double product_rule(double p_a_given_c, double p_b_given_ac) {
  check_probability(p_a_given_c, "p(a|c)");
  check_probability(p_b_given_ac, "p(b|ac)");
  return p_a_given_c * p_b_given_ac;
}

double sum_rule(double p_a, double p_b, double p_ab) {
  check_probability(p_a, "p(a)");
  check_probability(p_b, "p(b)");
  check_probability(p_ab, "p(ab)");
  if (p_ab > std::min(p_a, p_b)) {
    throw InconsistencyError("sum rule: p(ab) exceeds min(p(a), p(b))");
  }
  const double r = p_a + p_b - p_ab;
  if (r > 1.0 + 1e-15) throw InconsistencyError("sum rule: p(a or b) exceeds 1");
  return std::min(r, 1.0);
}

BayesResult bayes_update(const Distribution& prior, const ConditionalTable& likelihood,
                         std::size_t observed_evidence) {
  if (likelihood.hypothesis_count() != prior.size()) {
    throw DomainError("bayes: likelihood columns do not match prior size");
  }
  if (observed_evidence >= likelihood.evidence_count()) {
    throw DomainError("bayes: evidence index out of range");
  }
  std::vector<double> joint(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    joint[i] = prior[i] * likelihood(observed_evidence, i);
  }
  // Total probability: P(e) = sum_i P(e | h_i) P(h_i).
  const double evidence = pairwise_sum(joint);
  if (!(evidence > 0.0)) {
    throw UndefinedPosteriorError("bayes: observed evidence has zero probability under the prior");
  }
  for (double& j : joint) j /= evidence;
  return {Distribution::normalized(std::move(joint), prior.labels()), evidence};
}

double shannon_entropy(const Distribution& p, double k) {
  if (!(k > 0.0)) throw DomainError("entropy: k must be positive");
  std::vector<double> terms(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) terms[i] = -p[i] * std::log(p[i]);
  }
  return k * pairwise_sum(terms);
}

double relative_entropy(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw DomainError("relative entropy: size mismatch");
  std::vector<double> terms(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw DomainError("relative entropy: p has support where q vanishes");
    terms[i] = p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, pairwise_sum(terms));
}

MaxEntResult maxent_solve(const Distribution& prior, const std::vector<MomentConstraint>& constraints,
                          const MaxEntOptions& options) {
  const std::size_t n = prior.size();
  if (constraints.empty()) return {prior, {}, 0, 0.0};

  for (std::size_t c = 0; c < constraints.size(); ++c) {
    const auto& con = constraints[c];
    if (con.feature.size() != n) throw DomainError("maxent: feature length differs from prior size");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      if (prior[i] <= 0.0) continue;
      lo = std::min(lo, con.feature[i]);
      hi = std::max(hi, con.feature[i]);
    }
    if (!(con.target > lo && con.target < hi)) {
      std::ostringstream os;
      os << "maxent: target " << con.target << " of constraint " << c
         << " is not strictly inside the attainable range [" << lo << ", " << hi << "]";
      throw InfeasibleError(os.str());
    }
  }

  const std::vector<double>& q = prior.weights();
  std::vector<double> lambda(constraints.size(), 0.0);
  DualState state = evaluate_dual(q, constraints, lambda);
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const double residual = max_abs(state.gradient);
    if (residual < options.gradient_tolerance) break;

    // Newton step: lambda <- lambda - H^{-1} g, with g = target - <f>.
    std::vector<double> step;
    if (!solve_dense(state.hessian, state.gradient, step)) {
      throw ConvergenceError("maxent: singular constraint covariance (dependent features?)", residual);
    }

    // Backtracking on the dual objective, which is convex in lambda.
    double directional = 0.0;
    for (std::size_t c = 0; c < step.size(); ++c) directional += -state.gradient[c] * step[c];
    double t = 1.0;
    bool accepted = false;
    DualState trial;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> cand(lambda);
      for (std::size_t c = 0; c < cand.size(); ++c) cand[c] -= t * step[c];
      trial = evaluate_dual(q, constraints, cand);
      if (trial.value <= state.value + 1e-4 * t * directional || max_abs(trial.gradient) < residual) {
        lambda = std::move(cand);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Stalled at machine precision.
      if (residual < 1e-10) break;
      throw ConvergenceError("maxent: line search failed", residual);
    }
    state = std::move(trial);
  }
  const double residual = max_abs(state.gradient);
  if (residual >= options.gradient_tolerance && residual >= 1e-10) {
    throw ConvergenceError("maxent: no convergence within the iteration limit", residual);
  }
  return {Distribution::normalized(state.p, prior.labels()), lambda, it, residual};
}

std::vector<double> slit_decomposition_demo(const std::vector<std::vector<double>>& joint) {
  if (joint.size() != 2) throw DomainError("slit demo: joint table must have two rows (slits A and B)");
  if (joint[0].size() != joint[1].size()) throw DomainError("slit demo: ragged joint table");
  std::vector<double> totals(joint[0].size());
  // Passing through both slits is impossible, so the paths are exclusive and add.
  for (std::size_t x = 0; x < totals.size(); ++x) totals[x] = joint[0][x] + joint[1][x];
  return totals;
}

}  // namespace edlab::inference
