#pragma once

#include "core/beta_ensemble.hpp"
#include "core/sampling.hpp"

namespace roy {

/// Normalized spectral moments a1 = tr S / p, a2 = tr S^2 / p of a scale
/// matrix and the correction factor b = a1^2 / a2.
struct ScaleStats {
  double a1_hat = 1.0;
  double a2_hat = 1.0;
  double b = 1.0;

  /// b <= 1 for any true scale; estimates can overshoot and are kept as-is.
  bool b_exceeds_one() const noexcept { return b > 1.0; }
};

ScaleStats scale_moments_exact(const ScaleMatrix& scale);

/// Unbiased moment estimates from A = Z Z^T with m = dof columns:
///   a1 = tr A / (m p)
///   a2 = (tr A^2 - (tr A)^2 / m) / ((m - 1)(m + 2) p)
/// Traces come from the factor (tr A = |Z|_F^2, tr A^2 = |Z^T Z|_F^2).
ScaleStats estimate_scale_moments(const WishartSample& a, Index m, Index p);
ScaleStats estimate_scale_moments_from_factor(const Eigen::Ref<const Matrix>& z);
/// Same estimator from a realized p x p matrix A with m degrees of freedom.
ScaleStats estimate_scale_moments_from_matrix(const SymMatrix& a, Index m);

/// P(lambda <= x) ~ P(l_max(W_q(m)) <= p b x).
double theorem2_cdf(const EnsembleParams& params, const ScaleStats& stats, double x);

}  // namespace roy
