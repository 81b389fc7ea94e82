#include "core/exact_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/tracy_widom.hpp"

namespace roy {
namespace {

DoubleWishartParams canonicalize(const DoubleWishartParams& params) {
  params.validate();
  const DoubleWishartParams c = params.num_dof < params.dimension ? mardia_dual(params) : params;
  if (c.dimension > kMaxExactDimension) {
    throw UnsupportedParams("exact largest-root law limited to min(dimension, numerator dof) <= " +
                            std::to_string(kMaxExactDimension) + " (got " + std::to_string(c.dimension) + ")");
  }
  return c;
}

LargestRootLaw make_jacobi(const DoubleWishartParams& c) {
  return LargestRootLaw::jacobi(c.dimension, c.num_dof - c.dimension, c.den_dof - c.dimension);
}

LargestRootLaw make_laguerre(Index dim, Index dof) {
  if (dim < 1 || dof < 1) {
    throw InvalidParams("Wishart largest root needs dim >= 1 and dof >= 1 (got dim=" + std::to_string(dim) +
                        ", dof=" + std::to_string(dof) + ")");
  }
  const Index roots = std::min(dim, dof);
  if (roots > kMaxExactDimension) {
    throw UnsupportedParams("exact Wishart largest-root law limited to min(dim, dof) <= " +
                            std::to_string(kMaxExactDimension));
  }
  return LargestRootLaw::laguerre(roots, std::max(dim, dof) - roots);
}

void check_argument(double x, const char* what) {
  if (std::isnan(x) || x < 0.0) throw DomainError(std::string(what) + ": x must be >= 0");
}

}  // namespace

void DoubleWishartParams::validate() const {
  if (dimension < 1 || num_dof < 1 || den_dof < dimension) {
    throw InvalidParams("double Wishart parameters need dimension >= 1, num_dof >= 1, den_dof >= dimension (got " +
                        std::to_string(dimension) + ", " + std::to_string(num_dof) + ", " + std::to_string(den_dof) +
                        ")");
  }
}

DoubleWishartParams mardia_dual(const DoubleWishartParams& params) {
  params.validate();
  return {params.num_dof, params.dimension, params.den_dof + params.num_dof - params.dimension};
}

DoubleWishartLargestRoot::DoubleWishartLargestRoot(const DoubleWishartParams& params)
    : params_(params), canonical_(canonicalize(params)), law_(make_jacobi(canonical_)) {}

LargestRootLaw::Value DoubleWishartLargestRoot::evaluate(double x) const {
  check_argument(x, "double Wishart largest-root CDF");
  if (std::isinf(x)) return {1.0, false};
  return law_.evaluate(x / (1.0 + x));
}

double double_wishart_max_cdf(const DoubleWishartParams& params, double x) {
  return DoubleWishartLargestRoot(params).cdf(x);
}

WishartLargestRoot::WishartLargestRoot(Index dim, Index dof) : law_(make_laguerre(dim, dof)) {}

LargestRootLaw::Value WishartLargestRoot::evaluate(double x) const {
  check_argument(x, "Wishart largest-root CDF");
  if (std::isinf(x)) return {1.0, false};
  return law_.evaluate(x);
}

double wishart_max_cdf(Index dim, Index dof, double x) { return WishartLargestRoot(dim, dof).cdf(x); }

DoubleWishartParams ensemble_double_wishart(const EnsembleParams& params) {
  params.validate();
  return {params.q, params.m, params.p - params.m + params.q};
}

double theorem3_cdf(const EnsembleParams& params, double x) {
  return double_wishart_max_cdf(ensemble_double_wishart(params), x);
}

double theorem1_cdf(const EnsembleParams& params, double x) {
  params.validate();
  check_argument(x, "large-p largest-root CDF");
  return wishart_max_cdf(params.q, params.m, static_cast<double>(params.p) * x);
}

TracyWidomCentering tw_centering(const DoubleWishartParams& params) {
  params.validate();
  const double n = static_cast<double>(params.num_dof);
  const double s = static_cast<double>(params.dimension);
  const double total = static_cast<double>(params.den_dof) + n - 1.0;
  const double gamma = 2.0 * std::asin(std::sqrt((std::min(n, s) - 0.5) / total));
  const double phi = 2.0 * std::asin(std::sqrt((std::max(n, s) - 0.5) / total));
  TracyWidomCentering c;
  c.mu = 2.0 * std::log(std::tan(0.5 * (phi + gamma)));
  const double sp = std::sin(phi + gamma);
  c.sigma = std::cbrt(16.0 / (total * total) / (sp * sp * std::sin(phi) * std::sin(gamma)));
  return c;
}

TracyWidomCentering tw_centering(const EnsembleParams& params) {
  return tw_centering(ensemble_double_wishart(params));
}

bool tw_regime_warning(const EnsembleParams& params) noexcept { return 10 * params.q > params.m; }

double tw_cdf(const EnsembleParams& params, double x) {
  const TracyWidomCentering c = tw_centering(params);
  check_argument(x, "Tracy-Widom approximation");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return tracy_widom1_cdf((std::log(x) - c.mu) / c.sigma);
}

CdfCurve cdf_curve(const std::function<LargestRootLaw::Value(double)>& cdf, std::span<const double> grid,
                   unsigned workers) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidArgument("cdf_curve: grid must be ascending");
  std::vector<LargestRootLaw::Value> values(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) { values[i] = cdf(grid[i]); });
  CdfCurve curve;
  curve.x.assign(grid.begin(), grid.end());
  curve.cdf.reserve(grid.size());
  double running = 0.0;
  for (const LargestRootLaw::Value& v : values) {
    curve.conditioning_warning = curve.conditioning_warning || v.conditioning_warning;
    running = std::max(running, v.cdf);
    curve.cdf.push_back(running);
  }
  return curve;
}

CdfCurve CdfCurveCache::get_or_compute(const std::string& key, std::span<const double> grid,
                                       const std::function<CdfCurve()>& compute) {
  auto id = std::make_pair(key, std::vector<double>(grid.begin(), grid.end()));
  {
    std::lock_guard lock(mutex_);
    if (auto it = curves_.find(id); it != curves_.end()) return it->second;
  }
  CdfCurve curve = compute();
  std::lock_guard lock(mutex_);
  return curves_.try_emplace(std::move(id), std::move(curve)).first->second;
}

std::size_t CdfCurveCache::size() const {
  std::lock_guard lock(mutex_);
  return curves_.size();
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || hi < lo) throw InvalidArgument("linear_grid: need lo <= hi");
  std::vector<double> grid(points);
  if (points == 1) grid[0] = lo;
  for (std::size_t i = 0; points > 1 && i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

double quantile(const std::function<double(double)>& cdf, double prob, double tol) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile: probability must lie in [0, 1]");
  if (prob == 0.0) return 0.0;
  if (prob == 1.0) return std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; cdf(hi) < prob; ++it) {
    if (it > 2000) throw DomainError("quantile: probability not reached");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) >= prob ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace roy
