#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace edlab::inference {

// Finite discrete probability vector. Weights are non-negative and sum to
// one within 1e-12; construction enforces both.
class Distribution {
 public:
  explicit Distribution(std::vector<double> weights, std::vector<std::string> labels = {});

  // Rescales non-negative weights to unit sum before validating.
  static Distribution normalized(std::vector<double> weights, std::vector<std::string> labels = {});
  static Distribution uniform(std::size_t n);
  static Distribution delta(std::size_t n, std::size_t at);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<double> weights_;
  std::vector<std::string> labels_;
};

// Entry (j, i) is P(evidence j | hypothesis i); every entry lies in [0, 1].
class ConditionalTable {
 public:
  explicit ConditionalTable(std::vector<std::vector<double>> rows);

  std::size_t evidence_count() const { return rows_.size(); }
  std::size_t hypothesis_count() const { return rows_.empty() ? 0 : rows_.front().size(); }
  double operator()(std::size_t evidence, std::size_t hypothesis) const {
    return rows_[evidence][hypothesis];
  }

 private:
  std::vector<std::vector<double>> rows_;
};

// Expectation constraint <feature> = target.
struct MomentConstraint {
  std::vector<double> feature;
  double target = 0.0;
};

double product_rule(double p_a_given_c, double p_b_given_ac);
double sum_rule(double p_a, double p_b, double p_ab);

struct BayesResult {
  Distribution posterior;
  double evidence_probability;  // marginal P(evidence), by total probability
};

BayesResult bayes_update(const Distribution& prior, const ConditionalTable& likelihood,
                         std::size_t observed_evidence);

// -k sum p_i log p_i with 0 log 0 = 0.
double shannon_entropy(const Distribution& p, double k = 1.0);

// sum p_i log(p_i / q_i); requires q_i > 0 wherever p_i > 0.
double relative_entropy(const Distribution& p, const Distribution& q);

struct MaxEntOptions {
  std::size_t max_iterations = 200;
  double gradient_tolerance = 1e-12;
};

struct MaxEntResult {
  Distribution distribution;
  std::vector<double> multipliers;  // lambda_k in p_i ~ q_i exp(-sum_k lambda_k f_k,i)
  std::size_t iterations;
  double residual;  // max |<f_k> - target_k|
};

// Maximizes -K[p, prior] subject to the moment constraints by damped Newton
// iteration on the convex dual log Z(lambda) + lambda . target.
MaxEntResult maxent_solve(const Distribution& prior, const std::vector<MomentConstraint>& constraints,
                          const MaxEntOptions& options = {});

// Joint table over (slit, detector bin): row 0 is slit A, row 1 slit B.
// Returns p(x | both open) = p(A and x) + p(B and x) per bin.
std::vector<double> slit_decomposition_demo(const std::vector<std::vector<double>>& joint);

}  // namespace edlab::inference
