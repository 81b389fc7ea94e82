#pragma once

#include <functional>
#include <span>

#include "core/beta_ensemble.hpp"

namespace roy {

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `sample` against a
/// continuous CDF, evaluated exactly at the jump points.
double ks_distance(const EmpiricalCdf& sample, const std::function<double(double)>& cdf);

/// Asymptotic two-sided Kolmogorov p-value for distance d at sample size n
/// (Stephens' finite-n adjustment).
double ks_p_value(double d, std::size_t n);

/// max_i |f(x_i) - g(x_i)| over the grid.
double sup_difference(const std::function<double(double)>& f, const std::function<double(double)>& g,
                      std::span<const double> grid);

}  // namespace roy
