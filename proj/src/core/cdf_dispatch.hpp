#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "core/exact_dist.hpp"
#include "core/scale_correction.hpp"

namespace roy {

enum class Method { exact, theorem1, theorem2, tw };

Method parse_method(std::string_view name);
std::string to_string(Method method);

/// Largest-root CDF of the ensemble by any of the supported methods, built
/// once and evaluated many times. theorem2 needs the correction factor b.
class LargestRootCdf {
 public:
  LargestRootCdf(const EnsembleParams& params, Method method, std::optional<double> b = std::nullopt);

  LargestRootLaw::Value evaluate(double x) const;
  double cdf(double x) const { return evaluate(x).cdf; }

  const EnsembleParams& params() const noexcept { return params_; }
  Method method() const noexcept { return method_; }
  /// Correction factor applied on the p x scale (1 unless theorem2).
  double b() const noexcept { return b_; }
  /// tw only: parameters outside the regime the approximation targets.
  bool regime_warning() const noexcept { return regime_warning_; }

 private:
  EnsembleParams params_;
  Method method_;
  double b_ = 1.0;
  bool regime_warning_ = false;
  std::optional<DoubleWishartLargestRoot> exact_;
  std::optional<WishartLargestRoot> wishart_;
  TracyWidomCentering centering_;
};

/// 1 - CDF(observed).
double p_value(const LargestRootCdf& cdf, double observed);
double p_value(const EnsembleParams& params, double observed, Method method, std::optional<double> b = std::nullopt);

}  // namespace roy
