#pragma once

#include <memory>
#include <string_view>
#include <vector>

namespace roy {

/// Tracy-Widom (beta = 1) distribution function, interpolated (monotone
/// cubic) from a table of Fredholm-determinant values. Outside the table the
/// leading tail asymptotics are matched to the end points:
///   left:  log F(s)     ~ -|s|^3 / 24 - log|s| / 8
///   right: 1 - F(s)     ~ exp(-2 s^{3/2} / 3) / s^{3/4}
class TracyWidomTable {
 public:
  /// CSV text with header "s,F" and strictly increasing s.
  static TracyWidomTable parse(std::string_view csv);
  /// Table compiled into the library.
  static const TracyWidomTable& builtin();

  double cdf(double s) const;
  double s_min() const noexcept { return s_.front(); }
  double s_max() const noexcept { return s_.back(); }
  std::size_t size() const noexcept { return s_.size(); }

 private:
  TracyWidomTable(std::vector<double> s, std::vector<double> f);

  struct Interpolant;
  std::vector<double> s_;
  std::vector<double> f_;
  std::shared_ptr<const Interpolant> interpolant_;
};

inline double tracy_widom1_cdf(double s) { return TracyWidomTable::builtin().cdf(s); }

}  // namespace roy
