#include "core/largest_root_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "core/errors.hpp"

namespace roy {
namespace {

constexpr int kPanelNodes = 20;

// Integration stops where the weight falls below exp(-kLogCutoff - s) of
// its peak; the degree < s basis functions are negligible beyond that.
constexpr double kLogCutoff = 150.0;

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Gauss-Legendre rule on [-1, 1] plus the matrix S with
// S(k, l) = int_{-1}^{x_k} l_l(x) dx for the Lagrange basis l_l on the nodes.
struct PanelRule {
  std::array<double, kPanelNodes> nodes{};
  std::array<double, kPanelNodes> weights{};
  Eigen::Matrix<double, kPanelNodes, kPanelNodes> cumulative;

  PanelRule() {
    using Gauss = boost::math::quadrature::gauss<double, kPanelNodes>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weight = Gauss::weights();
    const int half = kPanelNodes / 2;
    for (int k = 0; k < half; ++k) {
      nodes[half - 1 - k] = -abscissa[k];
      weights[half - 1 - k] = weight[k];
      nodes[half + k] = abscissa[k];
      weights[half + k] = weight[k];
    }

    // Legendre values P_n(x_k) for n = 0..N.
    Eigen::Matrix<double, kPanelNodes + 1, kPanelNodes> legendre;
    for (int k = 0; k < kPanelNodes; ++k) {
      const double x = nodes[k];
      legendre(0, k) = 1.0;
      legendre(1, k) = x;
      for (int n = 1; n < kPanelNodes; ++n) {
        legendre(n + 1, k) = ((2.0 * n + 1.0) * x * legendre(n, k) - n * legendre(n - 1, k)) / (n + 1.0);
      }
    }
    // l_l(x) = w_l sum_n (2n + 1) / 2 P_n(x_l) P_n(x); integrate term by term
    // with int_{-1}^{x} P_n = (P_{n+1}(x) - P_{n-1}(x)) / (2n + 1).
    for (int k = 0; k < kPanelNodes; ++k) {
      for (int l = 0; l < kPanelNodes; ++l) {
        double sum = 0.5 * (nodes[k] + 1.0);
        for (int n = 1; n < kPanelNodes; ++n) {
          sum += 0.5 * (legendre(n + 1, k) - legendre(n - 1, k)) * legendre(n, l);
        }
        cumulative(k, l) = weights[l] * sum;
      }
    }
  }
};

const PanelRule& panel_rule() {
  static const PanelRule rule;
  return rule;
}

// Weight-times-Jacobian in the smooth variable, up to a constant.
double term(double power, double x) { return power == 0.0 ? 0.0 : power * std::log(x); }

}  // namespace

LargestRootLaw LargestRootLaw::jacobi(Index roots, Index sin_power, Index cos_power) {
  if (roots < 1 || sin_power < 0 || cos_power < 0) {
    throw InvalidParams("Jacobi largest-root law needs roots >= 1 and nonnegative powers");
  }
  return LargestRootLaw(Family::jacobi, roots, static_cast<double>(sin_power), static_cast<double>(cos_power));
}

LargestRootLaw LargestRootLaw::laguerre(Index roots, Index power) {
  if (roots < 1 || power < 0) {
    throw InvalidParams("Laguerre largest-root law needs roots >= 1 and a nonnegative power");
  }
  return LargestRootLaw(Family::laguerre, roots, static_cast<double>(power), 0.0);
}

double LargestRootLaw::log_weight(double v) const {
  if (family_ == Family::jacobi) {
    return term(first_power_, std::sin(v)) + term(second_power_, std::cos(v));
  }
  return term(first_power_, v) - 0.5 * v * v;
}

double LargestRootLaw::root_of(double v) const {
  if (family_ == Family::jacobi) {
    const double s = std::sin(v);
    return s * s;
  }
  return v * v;
}

double LargestRootLaw::variable_of(double t) const {
  if (family_ == Family::jacobi) return std::asin(std::sqrt(std::clamp(t, 0.0, 1.0)));
  return std::sqrt(std::max(t, 0.0));
}

LargestRootLaw::LargestRootLaw(Family family, Index roots, double first_power, double second_power)
    : family_(family), roots_(roots), first_power_(first_power), second_power_(second_power) {
  const double a = first_power_;
  const double b = second_power_;

  // Mode and curvature of the (concave) log weight.
  double mode = 0.0;
  double curvature = 0.0;
  double domain_hi = std::numeric_limits<double>::infinity();
  if (family_ == Family::jacobi) {
    domain_hi = kHalfPi;
    if (a == 0.0 && b == 0.0) {
      mode = 0.0;
    } else if (b == 0.0) {
      mode = kHalfPi;
    } else {
      mode = std::atan(std::sqrt(a / b));
    }
    const double s = std::sin(mode);
    const double c = std::cos(mode);
    curvature = (a > 0.0 ? a / (s * s) : 0.0) + (b > 0.0 ? b / (c * c) : 0.0);
  } else {
    mode = std::sqrt(a);
    curvature = (a > 0.0 ? a / (mode * mode) : 0.0) + 1.0;
  }
  log_weight_max_ = log_weight(mode);
  const double floor = log_weight_max_ - kLogCutoff - static_cast<double>(roots);

  auto crossing = [&](double inside, double outside) {
    for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-15 * (1.0 + std::abs(inside)); ++it) {
      const double mid = 0.5 * (inside + outside);
      (log_weight(mid) >= floor ? inside : outside) = mid;
    }
    return outside;
  };

  v_lo_ = log_weight(0.0) >= floor ? 0.0 : crossing(mode, 0.0);
  if (family_ == Family::jacobi) {
    v_hi_ = log_weight(domain_hi) >= floor ? domain_hi : crossing(mode, domain_hi);
  } else {
    double outside = mode + 1.0;
    while (log_weight(outside) >= floor) outside = mode + 2.0 * (outside - mode);
    v_hi_ = crossing(mode, outside);
  }

  const double span = v_hi_ - v_lo_;
  const double sd = curvature > 0.0 ? 1.0 / std::sqrt(curvature) : span;
  const double resolution = std::max(1.0, std::sqrt(static_cast<double>(roots_)) / 3.0);
  panel_width_ = std::min(sd / resolution, span / 8.0);

  // Discretized measure W(v)^2 dv: the basis psi_i = p_i(t(v)) W(v) is then
  // orthonormal in L^2(dv), where the sign kernel is well conditioned.
  const PanelRule& rule = panel_rule();
  const Index panels = std::max<Index>(1, static_cast<Index>(std::ceil(span / panel_width_)));
  const double h = span / static_cast<double>(panels);
  const Index count = panels * kPanelNodes;
  Vector t(count), w(count);
  for (Index p = 0; p < panels; ++p) {
    const double mid = v_lo_ + (static_cast<double>(p) + 0.5) * h;
    for (int k = 0; k < kPanelNodes; ++k) {
      const double v = mid + 0.5 * h * rule.nodes[k];
      t(p * kPanelNodes + k) = root_of(v);
      w(p * kPanelNodes + k) = 0.5 * h * rule.weights[k] * std::exp(2.0 * (log_weight(v) - log_weight_max_));
    }
  }

  // Stieltjes/Lanczos with full reorthogonalization.
  const Index s = roots_;
  const double mass = w.sum();
  p0_ = 1.0 / std::sqrt(mass);
  alpha_.assign(static_cast<std::size_t>(s), 0.0);
  beta_.assign(static_cast<std::size_t>(s), 0.0);
  Matrix basis(count, s);
  basis.col(0).setConstant(p0_);
  for (Index k = 0; k + 1 < s; ++k) {
    Vector next = t.cwiseProduct(basis.col(k));
    if (k > 0) next -= beta_[static_cast<std::size_t>(k)] * basis.col(k - 1);
    alpha_[static_cast<std::size_t>(k)] = next.dot(w.cwiseProduct(basis.col(k)));
    next -= alpha_[static_cast<std::size_t>(k)] * basis.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j <= k; ++j) next -= next.dot(w.cwiseProduct(basis.col(j))) * basis.col(j);
    }
    const double norm = std::sqrt(next.dot(w.cwiseProduct(next)));
    if (!(norm > 0.0)) throw UnsupportedParams("largest-root law: polynomial basis degenerated");
    beta_[static_cast<std::size_t>(k + 1)] = norm;
    basis.col(k + 1) = next / norm;
  }

  normalizer_ = pfaffian_up_to(v_hi_);
  if (normalizer_.sign == 0.0 || !std::isfinite(normalizer_.log_abs)) {
    throw UnsupportedParams("largest-root law: normalizing Pfaffian vanished (roots=" + std::to_string(s) + ")");
  }
}

SignedLog LargestRootLaw::pfaffian_up_to(double v_upper) const {
  const PanelRule& rule = panel_rule();
  const Index s = roots_;
  const double span = v_upper - v_lo_;
  const Index panels = std::max<Index>(1, static_cast<Index>(std::ceil(span / panel_width_ - 1e-9)));
  const double h = span / static_cast<double>(panels);

  using PanelMatrix = Eigen::Matrix<double, kPanelNodes, Eigen::Dynamic>;
  PanelMatrix psi(kPanelNodes, s);
  PanelMatrix running_at_nodes(kPanelNodes, s);
  Eigen::Matrix<double, kPanelNodes, 1> weights;
  Vector running = Vector::Zero(s);
  Matrix g = Matrix::Zero(s, s);

  for (Index p = 0; p < panels; ++p) {
    const double mid = v_lo_ + (static_cast<double>(p) + 0.5) * h;
    for (int k = 0; k < kPanelNodes; ++k) {
      const double v = mid + 0.5 * h * rule.nodes[k];
      const double tk = root_of(v);
      const double scale = std::exp(log_weight(v) - log_weight_max_);
      double prev = 0.0;
      double cur = p0_;
      psi(k, 0) = cur * scale;
      for (Index i = 1; i < s; ++i) {
        const auto j = static_cast<std::size_t>(i - 1);
        const double next = ((tk - alpha_[j]) * cur - beta_[j] * prev) / beta_[j + 1];
        prev = cur;
        cur = next;
        psi(k, i) = cur * scale;
      }
      weights(k) = 0.5 * h * rule.weights[k];
    }
    // Psi_i at each node: integral from v_lo up to the node.
    running_at_nodes.noalias() = (0.5 * h) * rule.cumulative * psi;
    running_at_nodes.rowwise() += running.transpose();
    // G_ij = int psi_j Psi_i
    g.noalias() += running_at_nodes.transpose() * weights.asDiagonal() * psi;
    running.noalias() += psi.transpose() * weights;
  }

  const Index order = s + (s % 2);
  Matrix skew(order, order);
  skew.topLeftCorner(s, s) = g - g.transpose();
  if (s % 2 != 0) {
    skew.col(s).head(s) = running;
    skew.row(s).head(s) = -running.transpose();
    skew(s, s) = 0.0;
  }
  return pfaffian_log(skew);
}

LargestRootLaw::Value LargestRootLaw::evaluate(double t) const {
  if (std::isnan(t)) return {std::numeric_limits<double>::quiet_NaN(), true};
  const double v = variable_of(t);
  if (v <= v_lo_) return {0.0, false};
  if (v >= v_hi_) return {1.0, false};
  const SignedLog pf = pfaffian_up_to(v);
  if (pf.sign == 0.0) return {0.0, false};
  const double ratio = pf.sign * normalizer_.sign * std::exp(pf.log_abs - normalizer_.log_abs);
  Value out;
  out.conditioning_warning = !std::isfinite(ratio) || ratio < -1e-9 || ratio > 1.0 + 1e-9;
  out.cdf = std::isfinite(ratio) ? (ratio > 0.0 ? std::min(ratio, 1.0) : 0.0) : ratio;
  return out;
}

}  // namespace roy
