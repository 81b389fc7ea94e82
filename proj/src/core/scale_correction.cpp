#include "core/scale_correction.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/exact_dist.hpp"

namespace roy {
namespace {

ScaleStats from_traces(double trace, double trace_sq, Index m, Index p) {
  if (m < 2) throw DegenerateDof("scale moment estimator needs m >= 2 (got m=" + std::to_string(m) + ")");
  if (p < 1) throw InvalidArgument("scale moment estimator needs p >= 1");
  const double md = static_cast<double>(m);
  const double pd = static_cast<double>(p);
  ScaleStats s;
  s.a1_hat = trace / (md * pd);
  s.a2_hat = (trace_sq - trace * trace / md) / ((md - 1.0) * (md + 2.0) * pd);
  s.b = s.a1_hat * s.a1_hat / s.a2_hat;
  return s;
}

}  // namespace

ScaleStats scale_moments_exact(const ScaleMatrix& scale) {
  const double p = static_cast<double>(scale.order());
  ScaleStats s;
  s.a1_hat = scale.trace() / p;
  s.a2_hat = scale.trace_of_square() / p;
  s.b = s.a1_hat * s.a1_hat / s.a2_hat;
  return s;
}

ScaleStats estimate_scale_moments_from_factor(const Eigen::Ref<const Matrix>& z) {
  Matrix gram = Matrix::Zero(z.cols(), z.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return from_traces(gram.trace(), gram.squaredNorm(), z.cols(), z.rows());
}

ScaleStats estimate_scale_moments(const WishartSample& a, Index m, Index p) {
  if (a.factor.cols() != m || a.factor.rows() != p) {
    throw InvalidArgument("estimate_scale_moments: factor is " + std::to_string(a.factor.rows()) + "x" +
                          std::to_string(a.factor.cols()) + ", expected " + std::to_string(p) + "x" +
                          std::to_string(m));
  }
  return estimate_scale_moments_from_factor(a.factor);
}

ScaleStats estimate_scale_moments_from_matrix(const SymMatrix& a, Index m) {
  return from_traces(a.dense().trace(), a.dense().squaredNorm(), m, a.order());
}

double theorem2_cdf(const EnsembleParams& params, const ScaleStats& stats, double x) {
  params.validate();
  if (!(stats.b > 0.0) || !std::isfinite(stats.b)) throw DomainError("theorem2_cdf: b must be positive");
  if (std::isnan(x) || x < 0.0) throw DomainError("theorem2_cdf: x must be >= 0");
  return wishart_max_cdf(params.q, params.m, static_cast<double>(params.p) * stats.b * x);
}

}  // namespace roy
