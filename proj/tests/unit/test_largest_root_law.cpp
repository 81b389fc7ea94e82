#include <cmath>
#include <vector>

#include "doctest.h"

#include "core/largest_root_law.hpp"
#include "core/matrix_core.hpp"
#include "oracles/chiani_recursion.hpp"

using namespace roy;

namespace {

struct JacobiCase {
  Index s;
  long num;
  long den;
};

}  // namespace

TEST_CASE("one Jacobi root is a beta variable") {
  for (long num : {1L, 2L, 7L}) {
    for (long den : {1L, 4L, 19L}) {
      const LargestRootLaw law = LargestRootLaw::jacobi(1, num - 1, den - 1);
      for (double t : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        CHECK(law.cdf(t) == doctest::Approx(reg_inc_beta(num / 2.0, den / 2.0, t)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("one Laguerre root is chi-square") {
  for (long dof : {1L, 2L, 9L, 40L}) {
    const LargestRootLaw law = LargestRootLaw::laguerre(1, dof - 1);
    for (double x : {0.1, 1.0, 5.0, 30.0, 60.0}) {
      CHECK(law.cdf(x) == doctest::Approx(reg_inc_gamma(dof / 2.0, x / 2.0)).epsilon(1e-11));
    }
  }
}

TEST_CASE("support end points and monotonicity") {
  const LargestRootLaw j = LargestRootLaw::jacobi(5, 3, 8);
  CHECK(j.cdf(0.0) == 0.0);
  CHECK(j.cdf(1.0) == 1.0);
  const LargestRootLaw l = LargestRootLaw::laguerre(4, 2);
  CHECK(l.cdf(0.0) == 0.0);
  CHECK(l.cdf(INFINITY) == 1.0);
  double prev = 0.0;
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const double f = j.cdf(t);
    CHECK(f >= prev - 1e-14);
    CHECK(f <= 1.0);
    prev = f;
  }
}

TEST_CASE("Jacobi law agrees with the high-precision recursion") {
  const std::vector<JacobiCase> cases = {{2, 2, 2},  {2, 3, 5},   {3, 8, 7},   {4, 10, 30},
                                         {5, 5, 5},  {7, 20, 9},  {6, 100, 406}, {9, 15, 60}};
  for (const JacobiCase& c : cases) {
    const LargestRootLaw law = LargestRootLaw::jacobi(c.s, c.num - c.s, c.den - c.s);
    for (double theta : {0.05, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 0.99}) {
      const double expected = static_cast<double>(oracle::jacobi_cdf(c.s, c.num, c.den, oracle::Real(theta)));
      const LargestRootLaw::Value got = law.evaluate(theta);
      CAPTURE(c.s);
      CAPTURE(c.num);
      CAPTURE(c.den);
      CAPTURE(theta);
      CHECK_FALSE(got.conditioning_warning);
      CHECK(std::abs(got.cdf - expected) < 1e-11);
      if (expected > 1e-200) CHECK(std::abs(got.cdf - expected) <= 1e-8 * expected + 1e-13);
    }
  }
}

TEST_CASE("Laguerre law agrees with the high-precision recursion") {
  const std::vector<std::pair<Index, long>> cases = {{2, 2}, {2, 5}, {3, 3}, {4, 96}, {5, 12}, {6, 100}};
  for (const auto& [dim, dof] : cases) {
    const LargestRootLaw law = LargestRootLaw::laguerre(dim, dof - dim);
    for (double x : {1.0, 3.0, 10.0, 30.0, 60.0, 100.0, 130.0, 160.0, 200.0}) {
      const double expected = static_cast<double>(oracle::laguerre_cdf(dim, dof, oracle::Real(x)));
      CAPTURE(dim);
      CAPTURE(dof);
      CAPTURE(x);
      CHECK(std::abs(law.cdf(x) - expected) < 1e-11);
    }
  }
}

TEST_CASE("many roots stay well conditioned") {
  for (Index s : {30, 60, 100}) {
    const LargestRootLaw law = LargestRootLaw::jacobi(s, 50, 400);
    double prev = 0.0;
    bool crossed = false;
    for (double t = 0.02; t < 1.0; t += 0.02) {
      const LargestRootLaw::Value v = law.evaluate(t);
      CHECK_FALSE(v.conditioning_warning);
      CHECK(v.cdf >= prev - 1e-12);
      crossed = crossed || (prev < 0.5 && v.cdf >= 0.5);
      prev = v.cdf;
    }
    CHECK(crossed);
  }
}
