// Goodness of fit, CDF dispatch, CSV and the thread pool.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "core/cdf_dispatch.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/goodness_of_fit.hpp"
#include "core/parallel.hpp"

using namespace roy;

TEST_CASE("KS distance is exact at the jumps") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance(EmpiricalCdf({0.5}), uniform) == doctest::Approx(0.5));
  // Samples 0.1, 0.2, 0.9: sup attained at 0.2 (2/3 vs 0.2).
  CHECK(ks_distance(EmpiricalCdf({0.2, 0.9, 0.1}), uniform) == doctest::Approx(2.0 / 3.0 - 0.2));
  // Ties jump by 2/n at once.
  CHECK(ks_distance(EmpiricalCdf({0.5, 0.5}), uniform) == doctest::Approx(0.5));
  // Brute force over a fine grid never exceeds it.
  const EmpiricalCdf e({0.05, 0.3, 0.31, 0.6, 0.62, 0.95});
  const double d = ks_distance(e, uniform);
  double brute = 0.0;
  for (double x = 0.0; x <= 1.0; x += 1e-5) brute = std::max(brute, std::abs(e(x) - uniform(x)));
  CHECK(brute <= d + 1e-12);
  CHECK(brute >= d - 1e-4);
}

TEST_CASE("Kolmogorov p-values") {
  CHECK(ks_p_value(0.0, 100) == doctest::Approx(1.0));
  CHECK(ks_p_value(1.0, 100) < 1e-20);
  // sqrt(n) d -> Kolmogorov law for large n; Stephens' factor ~ 1 here.
  const std::size_t n = 1000000;
  // scipy kstwobign survival function.
  const std::pair<double, double> limit[] = {
      {0.6, 0.8642827790506042}, {1.0, 0.26999967167735456}, {1.36, 0.049485876755377876},
      {1.63, 0.009846364888486529}};
  for (const auto& [t, sf] : limit) {
    const double d = t / std::sqrt(static_cast<double>(n));
    CHECK(ks_p_value(d, n) == doctest::Approx(sf).epsilon(1e-3));
  }
  // Textbook 5% critical value 1.358 / sqrt(n).
  CHECK(ks_p_value(1.358 / std::sqrt(10000.0), 10000) == doctest::Approx(0.05).epsilon(0.03));
}

TEST_CASE("sup difference over a grid") {
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  CHECK(sup_difference([](double x) { return x; }, [](double x) { return x * x; }, grid) == doctest::Approx(0.25));
}

TEST_CASE("method names") {
  for (Method m : {Method::exact, Method::theorem1, Method::theorem2, Method::tw}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("bogus"), InvalidArgument);
}

TEST_CASE("dispatch matches the underlying laws") {
  const EnsembleParams params{1000, 100, 6};
  const LargestRootCdf exact(params, Method::exact);
  const LargestRootCdf t1(params, Method::theorem1);
  const LargestRootCdf t2(params, Method::theorem2, 0.9);
  const LargestRootCdf tw(params, Method::tw);
  for (double x : {0.12, 0.16, 0.2}) {
    CHECK(exact.cdf(x) == theorem3_cdf(params, x));
    CHECK(t1.cdf(x) == theorem1_cdf(params, x));
    CHECK(t2.cdf(x) == theorem2_cdf(params, ScaleStats{1.0, 1.0 / 0.9, 0.9}, x));
    CHECK(tw.cdf(x) == tw_cdf(params, x));
  }
  CHECK(t2.b() == 0.9);
  CHECK(exact.b() == 1.0);
  CHECK_FALSE(tw.regime_warning());
  CHECK(LargestRootCdf(EnsembleParams{1000, 20, 6}, Method::tw).regime_warning());
  CHECK_THROWS_AS(LargestRootCdf(params, Method::theorem2), InvalidArgument);
  CHECK_THROWS_AS(LargestRootCdf(params, Method::theorem2, -1.0), DomainError);
  CHECK_THROWS_AS(LargestRootCdf(EnsembleParams{100, 100, 6}, Method::exact), InvalidParams);
  CHECK_THROWS_AS(exact.cdf(-1.0), DomainError);
}

TEST_CASE("p-values") {
  const EnsembleParams params{1000, 100, 6};
  for (Method m : {Method::exact, Method::theorem1, Method::tw}) CHECK(p_value(params, 0.0, m) == 1.0);
  const LargestRootCdf exact(params, Method::exact);
  const double q95 = quantile([&](double x) { return exact.cdf(x); }, 0.95);
  CHECK(p_value(exact, q95) == doctest::Approx(0.05).epsilon(1e-6));
  for (double x : {0.14, 0.16, 0.18, q95}) {
    CHECK(std::abs(p_value(params, x, Method::exact) - p_value(params, x, Method::tw)) <= 0.05);
  }
}

TEST_CASE("csv parsing and formatting") {
  const Matrix m = parse_csv_matrix("1,2.5\n\n-3e2, 4\n");
  REQUIRE(m.rows() == 2);
  CHECK(m(1, 0) == -300.0);
  CHECK(m(1, 1) == 4.0);
  CHECK_THROWS_AS(parse_csv_matrix("1,2\n3\n"), IoError);
  CHECK_THROWS_AS(parse_csv_matrix("1,abc\n"), IoError);
  CHECK_THROWS_AS(parse_csv_matrix(""), IoError);
  CHECK_THROWS_AS(read_csv_matrix("/nonexistent/roy.csv"), IoError);

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](std::size_t i) {
                                 if (i == 42) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("worker count from the environment") {
  setenv("ROY_EXACT_WORKERS", "3", 1);
  CHECK(default_worker_count() == 3);
  setenv("ROY_EXACT_WORKERS", "zero", 1);
  CHECK(default_worker_count() >= 1);
  unsetenv("ROY_EXACT_WORKERS");
  CHECK(default_worker_count() >= 1);
}
