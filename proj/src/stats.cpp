#include "edlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "edlab/errors.hpp"

namespace edlab {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  const double a2 = -2.0 * lambda * lambda;
  double sum = 0.0, sign = 1.0, prev = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * 2.0 * std::exp(a2 * j * j);
    sum += term;
    if (std::abs(term) <= 1e-12 * prev || std::abs(term) <= 1e-300) return std::clamp(sum, 0.0, 1.0);
    sign = -sign;
    prev = std::abs(term);
  }
  // Series failed to converge: lambda is tiny, so the distributions agree.
  return 1.0;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks test: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

}  // namespace edlab
