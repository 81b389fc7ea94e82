#pragma once

// Dense numerical kernels shared by the ensemble simulator and the exact
// largest-root distributions.

#include <optional>

#include <Eigen/Dense>

namespace roy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric matrix. Construction rejects inputs whose asymmetry exceeds
/// `tolerance * max(1, max|entry|)` and stores the symmetrized average.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix entries, double tolerance = 1e-12);

  Index order() const noexcept { return entries_.rows(); }
  const Matrix& dense() const noexcept { return entries_; }

 private:
  Matrix entries_;
};

/// Skew-symmetric matrix with an exactly zero diagonal.
class SkewMatrix {
 public:
  explicit SkewMatrix(Matrix entries, double tolerance = 1e-12);

  Index order() const noexcept { return entries_.rows(); }
  const Matrix& dense() const noexcept { return entries_; }

 private:
  Matrix entries_;
};

/// Nonzero eigensystem of Z Z^T for a full-column-rank p x n factor Z:
/// `vectors` is p x n column-orthonormal, `roots` are descending and positive.
struct EigenFactorization {
  Matrix vectors;
  Vector roots;
};

EigenFactorization sym_eigen_rank(const Eigen::Ref<const Matrix>& z);

/// Eigen-rotation of the Gram matrix Z^T Z = R diag(L) R^T (L descending).
/// The left singular vectors follow as H = Z R diag(L)^{-1/2}, so products
/// H^T X can be formed without materializing H. `well_conditioned` is false
/// when the Gram route cannot resolve the smallest singular value to full
/// accuracy; callers then fall back to sym_eigen_rank.
struct GramFactor {
  Matrix rotation;
  Vector roots;
  bool well_conditioned = true;
};

GramFactor gram_factor(const Eigen::Ref<const Matrix>& z);

/// order * machine epsilon.
double default_rank_tolerance(Index order) noexcept;

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix. Eigenvalues at or
/// below `rank_tol * max eigenvalue` are treated as zero.
SymMatrix pseudoinverse(const SymMatrix& m,
                        std::optional<double> rank_tol = std::nullopt);

/// Eigenvectors/eigenvalues of a symmetric PSD matrix retained above the
/// relative threshold, descending.
EigenFactorization retained_eigensystem(const SymMatrix& m,
                                        std::optional<double> rank_tol = std::nullopt);

/// Pfaffian by Householder skew-tridiagonalization. An odd-order matrix S is
/// first bordered to [[S, 1], [-1^T, 0]] with the all-ones column, which is
/// the convention used for odd-dimension largest-root kernels.
double pfaffian(const SkewMatrix& s);

struct SignedLog {
  double sign = 0.0;  // -1, 0 or +1
  double log_abs = 0.0;
};

/// Pfaffian of an even-order skew matrix as sign * exp(log_abs). The input is
/// not validated; use pfaffian() for checked access.
SignedLog pfaffian_log(const Eigen::Ref<const Matrix>& skew);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x).
double reg_inc_gamma(double a, double x);

}  // namespace roy
