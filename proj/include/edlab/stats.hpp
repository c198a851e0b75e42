#pragma once

#include <vector>

namespace edlab {

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
// distribution and the Stephens small-sample correction
// lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D, ne = na nb / (na + nb).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

}  // namespace edlab
