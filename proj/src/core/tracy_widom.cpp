#include "core/tracy_widom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace roy {

// Generated at configure time from data/tw1_table.csv.
extern const char* const kTracyWidom1Csv;

struct TracyWidomTable::Interpolant {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

TracyWidomTable::TracyWidomTable(std::vector<double> s, std::vector<double> f)
    : s_(std::move(s)), f_(std::move(f)) {
  if (s_.size() < 4) throw InvalidArgument("Tracy-Widom table needs at least 4 rows");
  for (std::size_t i = 0; i < s_.size(); ++i) {
    if (i > 0 && !(s_[i] > s_[i - 1])) throw InvalidArgument("Tracy-Widom table: abscissae must increase");
    if (!(f_[i] > 0.0 && f_[i] < 1.0)) throw InvalidArgument("Tracy-Widom table: values must lie in (0, 1)");
    if (i > 0 && f_[i] < f_[i - 1]) throw InvalidArgument("Tracy-Widom table: values must be nondecreasing");
  }
  if (s_.front() >= 0.0 || s_.back() <= 0.0) throw InvalidArgument("Tracy-Widom table must straddle 0");
  auto xs = s_;
  auto ys = f_;
  interpolant_ = std::make_shared<const Interpolant>(
      Interpolant{boost::math::interpolators::pchip<std::vector<double>>(std::move(xs), std::move(ys))});
}

TracyWidomTable TracyWidomTable::parse(std::string_view csv) {
  const auto eol = csv.find('\n');
  if (eol == std::string_view::npos) throw IoError("Tracy-Widom table: missing header");
  std::string_view header = csv.substr(0, eol);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header != "s,F") throw IoError("Tracy-Widom table: expected header \"s,F\"");
  const Matrix rows = parse_csv_matrix(csv.substr(eol + 1));
  if (rows.cols() != 2) throw IoError("Tracy-Widom table: expected two columns");
  std::vector<double> s(static_cast<std::size_t>(rows.rows()));
  std::vector<double> f(s.size());
  for (Index i = 0; i < rows.rows(); ++i) {
    s[static_cast<std::size_t>(i)] = rows(i, 0);
    f[static_cast<std::size_t>(i)] = rows(i, 1);
  }
  return TracyWidomTable(std::move(s), std::move(f));
}

const TracyWidomTable& TracyWidomTable::builtin() {
  static const TracyWidomTable table = parse(kTracyWidom1Csv);
  return table;
}

double TracyWidomTable::cdf(double s) const {
  if (std::isnan(s)) return std::numeric_limits<double>::quiet_NaN();
  if (s == -std::numeric_limits<double>::infinity()) return 0.0;
  if (s == std::numeric_limits<double>::infinity()) return 1.0;
  const double lo = s_.front();
  const double hi = s_.back();
  if (s < lo) {
    const double a = -s;
    const double a0 = -lo;
    const double log_f = std::log(f_.front()) - (a * a * a - a0 * a0 * a0) / 24.0 - std::log(a / a0) / 8.0;
    return std::exp(log_f);
  }
  if (s > hi) {
    const double log_tail = std::log1p(-f_.back()) - 2.0 / 3.0 * (std::pow(s, 1.5) - std::pow(hi, 1.5)) -
                            0.75 * std::log(s / hi);
    return -std::expm1(log_tail);
  }
  return std::clamp(interpolant_->spline(s), 0.0, 1.0);
}

}  // namespace roy
