#include "core/beta_ensemble.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace roy {
namespace {

Vector top_roots(const Matrix& symmetric, Index count) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  Vector all = solver.eigenvalues().reverse();
  Vector out = all.head(count);
  for (Index i = 0; i < out.size(); ++i) out(i) = std::max(0.0, out(i));
  return out;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix outer_product(const Matrix& z) {
  Matrix out = Matrix::Zero(z.rows(), z.rows());
  out.selfadjointView<Eigen::Lower>().rankUpdate(z);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

}  // namespace

void EnsembleParams::validate() const {
  if (m < 1 || q < 1) {
    throw InvalidParams("ensemble parameters need m >= 1 and q >= 1 (got m=" + std::to_string(m) +
                        ", q=" + std::to_string(q) + ")");
  }
  if (p <= std::max(m, q)) {
    throw InvalidParams("doubly singular regime needs p > max(m, q) (got p=" + std::to_string(p) +
                        ", m=" + std::to_string(m) + ", q=" + std::to_string(q) + ")");
  }
}

EnsembleDraw draw_ensemble(RngStream& rng, const EnsembleParams& params, const ScaleMatrix& scale) {
  params.validate();
  if (scale.order() != params.p) throw InvalidArgument("draw_ensemble: scale order differs from p");
  WishartSample a = sample_wishart(rng, params.p, params.m, scale);
  WishartSample b = sample_wishart(rng, params.p, params.q, scale);
  return EnsembleDraw{std::move(a), std::move(b)};
}

Vector reduced_spectrum(const EnsembleDraw& draw) {
  const Matrix& za = draw.a.factor;
  const Matrix& zb = draw.b.factor;
  const ScaleMatrix& scale = draw.a.scale;
  if (zb.rows() != za.rows()) throw InvalidArgument("reduced_spectrum: factor dimensions differ");
  const Index count = std::min(za.cols(), zb.cols());

  // H^T Zb and, for a non-identity scale, H^T Sigma H.
  Vector roots;
  Matrix projected;
  Matrix sigma_in_range;
  const GramFactor gram = gram_factor(za);
  if (gram.well_conditioned) {
    roots = gram.roots;
    const Vector inv_sqrt = roots.cwiseSqrt().cwiseInverse();
    const Matrix rotate = gram.rotation * inv_sqrt.asDiagonal();
    projected = rotate.transpose() * (za.transpose() * zb);
    if (!scale.is_identity()) sigma_in_range = rotate.transpose() * scale.congruence(za) * rotate;
  } else {
    const EigenFactorization h = sym_eigen_rank(za);
    roots = h.roots;
    projected = h.vectors.transpose() * zb;
    if (!scale.is_identity()) sigma_in_range = scale.congruence(h.vectors);
  }

  Matrix form;
  if (scale.is_identity()) {
    // C = I: V = H^T Zb and C L C = L.
    form = projected.transpose() * roots.cwiseInverse().asDiagonal() * projected;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(sigma_in_range));
    const Vector& kappa = solver.eigenvalues();
    if (!(kappa.minCoeff() > 0.0)) throw RankDeficient("reduced_spectrum: H^T Sigma H is not positive definite");
    const Matrix& r = solver.eigenvectors();
    const Matrix c = r * kappa.cwiseSqrt().cwiseInverse().asDiagonal() * r.transpose();
    const Matrix v = c * projected;
    const Matrix clc = symmetrized(c * roots.asDiagonal() * c);
    Eigen::LLT<Matrix> llt(clc);
    if (llt.info() != Eigen::Success) throw RankDeficient("reduced_spectrum: C L C is not positive definite");
    form = v.transpose() * llt.solve(v);
  }
  return top_roots(symmetrized(form), count);
}

double largest_root_reduced(const EnsembleDraw& draw) { return reduced_spectrum(draw)(0); }

double limit_deviation(const EnsembleDraw& draw) {
  const Matrix& za = draw.a.factor;
  const ScaleMatrix& scale = draw.a.scale;
  const double p = static_cast<double>(za.rows());
  const double b = scale.trace() * scale.trace() / (p * scale.trace_of_square());
  const EigenFactorization h = sym_eigen_rank(za);
  Matrix clc = h.roots.asDiagonal();
  if (!scale.is_identity()) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(scale.congruence(h.vectors)));
    const Matrix& r = solver.eigenvectors();
    const Matrix c = r * solver.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * r.transpose();
    clc = symmetrized(c * h.roots.asDiagonal() * c);
  }
  const Matrix dev = p * b * clc.inverse() - Matrix::Identity(clc.rows(), clc.cols());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(dev), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double largest_root_reduced(RngStream& rng, const EnsembleParams& params, const ScaleMatrix& scale) {
  return largest_root_reduced(draw_ensemble(rng, params, scale));
}

GeneralizedEigenSolution solve_direct(const EnsembleDraw& draw, bool with_transform) {
  const Matrix& za = draw.a.factor;
  const Matrix& zb = draw.b.factor;
  const Index m = za.cols();
  const Index count = std::min(m, zb.cols());

  const SymMatrix a(outer_product(za));
  const EigenFactorization range = retained_eigensystem(a);
  if (range.roots.size() != m) {
    throw RankDeficient("solve_direct: A has numerical rank " + std::to_string(range.roots.size()) +
                        ", expected " + std::to_string(m));
  }
  const Matrix a_plus = range.vectors * range.roots.cwiseInverse().asDiagonal() * range.vectors.transpose();

  GeneralizedEigenSolution out;
  out.roots = top_roots(symmetrized(zb.transpose() * a_plus * zb), count);

  if (with_transform) {
    const Matrix b = outer_product(zb);
    const Matrix t1 = range.vectors * range.roots.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(t1.transpose() * b * t1));
    out.transform = t1 * solver.eigenvectors().rowwise().reverse();
  }
  return out;
}

GeneralizedEigenSolution largest_root_direct(RngStream& rng, const EnsembleParams& params,
                                             const ScaleMatrix& scale, bool with_transform) {
  return solve_direct(draw_ensemble(rng, params, scale), with_transform);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, std::size_t resampled)
    : sorted_(std::move(samples)), resampled_(resampled) {
  if (sorted_.empty()) throw InvalidArgument("EmpiricalCdf: need at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto above = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(above - sorted_.begin()) / static_cast<double>(sorted_.size());
}

void EmpiricalCdf::write_csv(std::ostream& out) const {
  out << "x,F\n";
  const double n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    out << format_double(sorted_[i]) << ',' << format_double(static_cast<double>(i + 1) / n) << '\n';
  }
}

std::uint64_t replicate_stream_id(std::uint64_t index, int attempt) noexcept {
  return index | (static_cast<std::uint64_t>(attempt) << 56);
}

EmpiricalCdf simulate_empirical_cdf(std::uint64_t seed, const EnsembleParams& params, const ScaleMatrix& scale,
                                    std::size_t n_sims, const SimulationOptions& options) {
  params.validate();
  if (n_sims < 1) throw InvalidArgument("simulate_empirical_cdf: n_sims must be >= 1");
  if (scale.order() != params.p) throw InvalidArgument("simulate_empirical_cdf: scale order differs from p");
  std::size_t resampled = 0;
  std::vector<double> samples = run_replicates(
      seed, n_sims, [&](RngStream& rng) { return largest_root_reduced(rng, params, scale); }, options, &resampled);
  return EmpiricalCdf(std::move(samples), resampled);
}

}  // namespace roy
