#include "core/cdf_dispatch.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/tracy_widom.hpp"

namespace roy {

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::exact;
  if (name == "theorem1") return Method::theorem1;
  if (name == "theorem2") return Method::theorem2;
  if (name == "tw") return Method::tw;
  throw InvalidArgument("unknown method '" + std::string(name) + "' (expected exact, theorem1, theorem2 or tw)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::theorem1: return "theorem1";
    case Method::theorem2: return "theorem2";
    case Method::tw: return "tw";
  }
  return "unknown";
}

LargestRootCdf::LargestRootCdf(const EnsembleParams& params, Method method, std::optional<double> b)
    : params_(params), method_(method) {
  params_.validate();
  switch (method_) {
    case Method::exact:
      exact_.emplace(ensemble_double_wishart(params_));
      break;
    case Method::theorem2:
      if (!b) throw InvalidArgument("theorem2 needs a correction factor b");
      if (!(*b > 0.0) || !std::isfinite(*b)) throw DomainError("theorem2: b must be positive and finite");
      b_ = *b;
      [[fallthrough]];
    case Method::theorem1:
      wishart_.emplace(params_.q, params_.m);
      break;
    case Method::tw:
      centering_ = tw_centering(params_);
      regime_warning_ = tw_regime_warning(params_);
      break;
  }
}

LargestRootLaw::Value LargestRootCdf::evaluate(double x) const {
  if (std::isnan(x) || x < 0.0) throw DomainError("largest-root CDF: x must be >= 0");
  switch (method_) {
    case Method::exact:
      return exact_->evaluate(x);
    case Method::theorem1:
    case Method::theorem2:
      return wishart_->evaluate(static_cast<double>(params_.p) * b_ * x);
    case Method::tw:
      if (x == 0.0) return {0.0, false};
      if (std::isinf(x)) return {1.0, false};
      return {tracy_widom1_cdf((std::log(x) - centering_.mu) / centering_.sigma), false};
  }
  return {};
}

double p_value(const LargestRootCdf& cdf, double observed) { return std::clamp(1.0 - cdf.cdf(observed), 0.0, 1.0); }

double p_value(const EnsembleParams& params, double observed, Method method, std::optional<double> b) {
  return p_value(LargestRootCdf(params, method, b), observed);
}

}  // namespace roy
