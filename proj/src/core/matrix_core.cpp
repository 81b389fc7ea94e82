#include "core/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "core/errors.hpp"

namespace roy {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Gram eigenvalue ratio below which the smallest singular value is no longer
// resolved to better than ~1e-8 relative; sym_eigen_rank then uses an SVD.
constexpr double kGramConditionFloor = 1e-8;

double max_abs_or_one(const Matrix& m) {
  return m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

SymMatrix::SymMatrix(Matrix entries, double tolerance) : entries_(std::move(entries)) {
  require_square(entries_, "SymMatrix");
  const double bound = tolerance * max_abs_or_one(entries_);
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > bound) {
    throw InvalidArgument("SymMatrix: input is not symmetric");
  }
  entries_ = (0.5 * (entries_ + entries_.transpose())).eval();
}

SkewMatrix::SkewMatrix(Matrix entries, double tolerance) : entries_(std::move(entries)) {
  require_square(entries_, "SkewMatrix");
  const double bound = tolerance * max_abs_or_one(entries_);
  if ((entries_ + entries_.transpose()).cwiseAbs().maxCoeff() > 2.0 * bound) {
    throw InvalidArgument("SkewMatrix: input is not skew-symmetric");
  }
  entries_ = (0.5 * (entries_ - entries_.transpose())).eval();
  entries_.diagonal().setZero();
}

GramFactor gram_factor(const Eigen::Ref<const Matrix>& z) {
  const Index n = z.cols();
  if (n == 0 || n > z.rows()) {
    throw InvalidArgument("gram_factor: need 1 <= columns <= rows");
  }
  Matrix gram = Matrix::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram.selfadjointView<Eigen::Lower>());
  GramFactor out;
  out.roots = solver.eigenvalues().reverse();
  out.rotation = solver.eigenvectors().rowwise().reverse();
  const double largest = out.roots(0);
  const double smallest = out.roots(n - 1);
  out.well_conditioned = largest > 0.0 && smallest > kGramConditionFloor * largest;
  return out;
}

EigenFactorization sym_eigen_rank(const Eigen::Ref<const Matrix>& z) {
  const Index p = z.rows();
  const Index n = z.cols();
  if (n == 0 || n > p) {
    throw InvalidArgument("sym_eigen_rank: need 1 <= n <= p for a p x n factor");
  }
  if (!z.allFinite()) {
    throw DomainError("sym_eigen_rank: factor has non-finite entries");
  }

  GramFactor gram = gram_factor(z);
  EigenFactorization out;
  if (gram.well_conditioned) {
    out.roots = gram.roots;
    out.vectors = z * (gram.rotation * gram.roots.cwiseSqrt().cwiseInverse().asDiagonal());
    return out;
  }

  Eigen::BDCSVD<Matrix> svd(z, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  const double order = static_cast<double>(std::max(p, n));
  if (!(sigma(n - 1) > order * 1e-12 * sigma(0))) {
    throw RankDeficient("sym_eigen_rank: factor is numerically rank deficient (sigma_min/sigma_max = " +
                        std::to_string(sigma(0) > 0 ? sigma(n - 1) / sigma(0) : 0.0) + ")");
  }
  out.vectors = svd.matrixU();
  out.roots = sigma.array().square();
  return out;
}

double default_rank_tolerance(Index order) noexcept {
  return static_cast<double>(order) * kEps;
}

EigenFactorization retained_eigensystem(const SymMatrix& m, std::optional<double> rank_tol) {
  const double tol = rank_tol.value_or(default_rank_tolerance(m.order()));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.dense());
  const Vector& values = solver.eigenvalues();
  const double largest = std::max(0.0, values.maxCoeff());
  const double threshold = tol * largest;

  std::vector<Index> kept;
  for (Index i = values.size() - 1; i >= 0; --i) {
    if (largest > 0.0 && values(i) > threshold) kept.push_back(i);
  }
  EigenFactorization out;
  out.vectors.resize(m.order(), static_cast<Index>(kept.size()));
  out.roots.resize(static_cast<Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.vectors.col(static_cast<Index>(k)) = solver.eigenvectors().col(kept[k]);
    out.roots(static_cast<Index>(k)) = values(kept[k]);
  }
  return out;
}

SymMatrix pseudoinverse(const SymMatrix& m, std::optional<double> rank_tol) {
  const EigenFactorization eig = retained_eigensystem(m, rank_tol);
  Matrix inverse = eig.vectors * eig.roots.cwiseInverse().asDiagonal() * eig.vectors.transpose();
  return SymMatrix(std::move(inverse), 1e-8);
}

SignedLog pfaffian_log(const Eigen::Ref<const Matrix>& skew) {
  const Index n = skew.rows();
  SignedLog out{1.0, 0.0};
  if (n == 0) return out;
  if (n % 2 != 0) return {0.0, -std::numeric_limits<double>::infinity()};

  Matrix a = skew;
  auto accumulate = [&out](double factor) {
    if (factor == 0.0) {
      out.sign = 0.0;
      out.log_abs = -std::numeric_limits<double>::infinity();
      return;
    }
    if (factor < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(factor));
  };

  for (Index i = 0; i + 2 < n; ++i) {
    const Index len = n - i - 1;
    Vector v = a.col(i).tail(len);
    const double sigma = v.tail(len - 1).squaredNorm();
    double alpha = v(0);
    bool reflected = false;
    if (sigma > 0.0) {
      const double norm_x = std::sqrt(v(0) * v(0) + sigma);
      if (v(0) <= 0.0) {
        v(0) -= norm_x;
        alpha = norm_x;
      } else {
        v(0) += norm_x;
        alpha = -norm_x;
      }
      v.normalize();
      reflected = true;
    }
    a(i + 1, i) = alpha;
    a(i, i + 1) = -alpha;
    a.col(i).tail(len - 1).setZero();
    a.row(i).tail(len - 1).setZero();
    if (reflected) {
      auto block = a.bottomRightCorner(len, len);
      const Vector w = 2.0 * (block * v);
      block.noalias() += v * w.transpose() - w * v.transpose();
      // each reflector has determinant -1
      out.sign = -out.sign;
    }
    if (i % 2 == 0) {
      accumulate(-alpha);
      if (out.sign == 0.0) return out;
    }
  }
  accumulate(a(n - 2, n - 1));
  return out;
}

double pfaffian(const SkewMatrix& s) {
  const Index n = s.order();
  SignedLog pf;
  if (n % 2 == 0) {
    pf = pfaffian_log(s.dense());
  } else {
    Matrix bordered = Matrix::Zero(n + 1, n + 1);
    bordered.topLeftCorner(n, n) = s.dense();
    bordered.col(n).head(n).setOnes();
    bordered.row(n).head(n).setConstant(-1.0);
    pf = pfaffian_log(bordered);
  }
  return pf.sign == 0.0 ? 0.0 : pf.sign * std::exp(pf.log_abs);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("reg_inc_beta: shape parameters must be positive and finite");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("reg_inc_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double reg_inc_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("reg_inc_gamma: shape must be positive and finite");
  }
  if (!(x >= 0.0)) {
    throw DomainError("reg_inc_gamma: x must be nonnegative");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(a, x);
}

}  // namespace roy
