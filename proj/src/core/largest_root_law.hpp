#pragma once

#include <vector>

#include "core/matrix_core.hpp"

namespace roy {

/// Exact CDF of the largest of s roots whose joint density on ordered roots
/// is proportional to prod w(t_i) prod_{i<j} (t_j - t_i), for the two real
/// classical weights
///
///   Jacobi:   w(t) = t^a (1 - t)^b     on [0, 1]
///   Laguerre: w(t) = t^a exp(-t / 2)   on [0, inf)
///
/// with a, b in {-1/2, 0, 1/2, 1, ...}. By de Bruijn's identity the
/// probability that every root lies below x is Pf(M(x)) / Pf(M(end)), where
/// M_ij(x) = int int_{[0,x]^2} sgn(y - z) psi_i(z) psi_j(y) dz dy over any
/// basis psi_i = P_i(t) w(t) of polynomials of degree < s (bordered by the
/// single integrals when s is odd).
///
/// The basis here is orthonormal with respect to w, which keeps M well
/// conditioned; the monomial basis cancels catastrophically once the weight
/// is sharply peaked. Integrals run in a variable v where every integrand is
/// entire: t = sin^2 v (Jacobi) or t = v^2 (Laguerre), turning the weight
/// into sin^A v cos^B v or v^A exp(-v^2 / 2) with integer A = 2a + 1 and
/// B = 2b + 1. Composite Gauss-Legendre panels with a spectral in-panel
/// integration matrix give the nested sign-kernel integrals to near machine
/// precision.
class LargestRootLaw {
 public:
  enum class Family { jacobi, laguerre };

  struct Value {
    double cdf = 0.0;
    bool conditioning_warning = false;
  };

  /// sin_power = 2a + 1, cos_power = 2b + 1, both >= 0.
  static LargestRootLaw jacobi(Index roots, Index sin_power, Index cos_power);
  /// power = 2a + 1 >= 0.
  static LargestRootLaw laguerre(Index roots, Index power);

  /// P(largest root <= t), t on the root scale ([0, 1] for Jacobi).
  Value evaluate(double t) const;
  double cdf(double t) const { return evaluate(t).cdf; }

  Family family() const noexcept { return family_; }
  Index roots() const noexcept { return roots_; }

 private:
  LargestRootLaw(Family family, Index roots, double first_power, double second_power);

  double log_weight(double v) const;
  double root_of(double v) const;
  double variable_of(double t) const;
  SignedLog pfaffian_up_to(double v_upper) const;

  Family family_;
  Index roots_;
  double first_power_;
  double second_power_;
  double log_weight_max_ = 0.0;
  double v_lo_ = 0.0;
  double v_hi_ = 0.0;
  double panel_width_ = 0.0;
  // Three-term recurrence of the orthonormal polynomials:
  // beta_{k+1} p_{k+1} = (t - alpha_k) p_k - beta_k p_{k-1}, p_0 = 1 / sqrt(mass).
  std::vector<double> alpha_;
  std::vector<double> beta_;
  double p0_ = 1.0;
  SignedLog normalizer_;
};

}  // namespace roy
