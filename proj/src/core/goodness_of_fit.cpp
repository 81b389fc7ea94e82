#include "core/goodness_of_fit.hpp"

#include <algorithm>
#include <cmath>

namespace roy {

double ks_distance(const EmpiricalCdf& sample, const std::function<double(double)>& cdf) {
  const std::vector<double>& x = sample.sorted_samples();
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(j) / n - f});
    i = j;
  }
  return d;
}

double ks_p_value(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double sup_difference(const std::function<double(double)>& f, const std::function<double(double)>& g,
                      std::span<const double> grid) {
  double d = 0.0;
  for (double x : grid) d = std::max(d, std::abs(f(x) - g(x)));
  return d;
}

}  // namespace roy
