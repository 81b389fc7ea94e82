#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <span>
#include <vector>

#include "core/beta_ensemble.hpp"
#include "core/largest_root_law.hpp"

namespace roy {

/// Largest eigenvalue of B^{-1} A with A ~ W_s(num) and B ~ W_s(den),
/// independent with a common scale (den >= s, num >= 1). The law does not
/// depend on the scale.
struct DoubleWishartParams {
  Index dimension = 0;
  Index num_dof = 0;
  Index den_dof = 0;

  void validate() const;
  bool operator==(const DoubleWishartParams&) const = default;
};

/// Parameters with the same largest-root law, dimension and numerator dof
/// exchanged: (s, n, d) -> (n, s, d + n - s).
DoubleWishartParams mardia_dual(const DoubleWishartParams& params);

/// Largest canonical dimension (min(s, n)) evaluated exactly.
inline constexpr Index kMaxExactDimension = 100;

class DoubleWishartLargestRoot {
 public:
  explicit DoubleWishartLargestRoot(const DoubleWishartParams& params);

  /// P(lambda_max <= x) for x >= 0 (x = +inf allowed).
  LargestRootLaw::Value evaluate(double x) const;
  double cdf(double x) const { return evaluate(x).cdf; }

  const DoubleWishartParams& params() const noexcept { return params_; }
  /// The parameterization actually evaluated (dimension <= numerator dof).
  const DoubleWishartParams& canonical() const noexcept { return canonical_; }

 private:
  DoubleWishartParams params_;
  DoubleWishartParams canonical_;
  LargestRootLaw law_;
};

double double_wishart_max_cdf(const DoubleWishartParams& params, double x);

/// Largest eigenvalue of W_dim(dof, I); singular cases (dof < dim) use the
/// nonzero spectrum shared with W_dof(dim, I).
class WishartLargestRoot {
 public:
  WishartLargestRoot(Index dim, Index dof);

  LargestRootLaw::Value evaluate(double x) const;
  double cdf(double x) const { return evaluate(x).cdf; }

 private:
  LargestRootLaw law_;
};

double wishart_max_cdf(Index dim, Index dof, double x);

/// Double Wishart parameters whose largest root has the law of the largest
/// root of the doubly singular ensemble (p, m, q).
DoubleWishartParams ensemble_double_wishart(const EnsembleParams& params);

/// Exact law of the ensemble's largest root.
double theorem3_cdf(const EnsembleParams& params, double x);

/// Large-p approximation P(lambda <= x) ~ P(l_max(W_q(m)) <= p x).
double theorem1_cdf(const EnsembleParams& params, double x);

/// Centering and scaling of log(lambda) for the Tracy-Widom approximation.
struct TracyWidomCentering {
  double mu = 0.0;
  double sigma = 1.0;
};

TracyWidomCentering tw_centering(const DoubleWishartParams& params);
TracyWidomCentering tw_centering(const EnsembleParams& params);

/// True when q > m / 10, where the Tracy-Widom approximation is rough.
bool tw_regime_warning(const EnsembleParams& params) noexcept;

/// F1((log x - mu) / sigma).
double tw_cdf(const EnsembleParams& params, double x);

/// Monotone CDF samples on a grid.
struct CdfCurve {
  std::vector<double> x;
  std::vector<double> cdf;
  bool conditioning_warning = false;
};

/// Evaluates `cdf` on `grid` (in parallel over points; `cdf` must be
/// reentrant) and enforces monotonicity with a running maximum over the
/// grid order. `grid` must be ascending.
CdfCurve cdf_curve(const std::function<LargestRootLaw::Value(double)>& cdf, std::span<const double> grid,
                   unsigned workers = 1);

/// In-memory memo of curves keyed by an evaluator name and the exact grid.
class CdfCurveCache {
 public:
  CdfCurve get_or_compute(const std::string& key, std::span<const double> grid,
                          const std::function<CdfCurve()>& compute);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::vector<double>>, CdfCurve> curves_;
};

/// Evenly spaced grid of `points` values on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// Smallest x with cdf(x) >= prob, by bisection to relative tolerance `tol`.
/// `cdf` must be nondecreasing on [0, inf).
double quantile(const std::function<double(double)>& cdf, double prob, double tol = 1e-12);

}  // namespace roy
