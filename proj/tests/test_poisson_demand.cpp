#include "allpay/errors.hpp"
#include "allpay/poisson_demand.hpp"

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using allpay::poisson::expect_over_demand;
using allpay::poisson::SeriesPolicy;
using allpay::poisson::z;

TEST_CASE("z at zero rate is a certain empty store")
{
  CHECK(z(0, 0.0) == 1.0);
  CHECK(z(3, 0.0) == 0.0);
}

TEST_CASE("z(0, 1) is e^-1")
{
  CHECK(z(0, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
}

TEST_CASE("z_1 equals x z_0 at sample rates")
{
  for (double x : {0.5, 1.0, 2.0})
  {
    CHECK(z(1, x) == x * z(0, x));
  }
}

TEST_CASE("z rejects negative arguments")
{
  CHECK_THROWS_AS(z(-1, 1.0), allpay::DomainError);
  CHECK_THROWS_AS(z(0, -0.5), allpay::DomainError);
  CHECK_THROWS_AS(z(0, std::nan("")), allpay::DomainError);
}

TEST_CASE("z matches a running-product oracle")
{
  for (double x : {0.01, 0.3, 1.0, 4.5, 12.0, 20.0})
  {
    for (int n = 0; n <= 80; ++n)
    {
      double const want = oracle::poisson_mass(n, x);
      CHECK(z(n, x) == doctest::Approx(want).epsilon(1e-12).scale(0.0));
    }
  }
}

TEST_CASE("z stays finite for very large counts")
{
  double const v = z(5000, 20.0);
  CHECK(std::isfinite(v));
  CHECK(v >= 0.0);
  CHECK(z(200, 150.0) == doctest::Approx(oracle::poisson_mass(200, 150.0)).epsilon(1e-9));
}

TEST_CASE("property: total mass is one on [0, 20]")
{
  gen::Source src(11);
  for (int i = 0; i < 200; ++i)
  {
    double const x   = src.uniform(0.0, 20.0);
    auto const   sum = expect_over_demand(x, [](int) { return 1.0; });
    CHECK(std::abs(sum.value - 1.0) < 1e-12);
    CHECK(sum.error_bound <= 1e-12);
  }
}

TEST_CASE("property: z_1 = x z_0 and z_0 is multiplicative")
{
  gen::Source src(12);
  for (int i = 0; i < 500; ++i)
  {
    double const x = src.uniform(0.0, 20.0);
    double const y = src.uniform(0.0, 20.0);
    CHECK(z(1, x) == x * z(0, x));
    // rounding of x + y alone perturbs exp by (x + y) ulp
    double const ulps = 4.0 * (x + y + 1.0) * std::numeric_limits<double>::epsilon();
    CHECK(z(0, x + y) == doctest::Approx(z(0, x) * z(0, y)).epsilon(ulps).scale(0.0));
  }
}

TEST_CASE("series examples")
{
  SUBCASE("constant one")
  {
    CHECK(std::abs(expect_over_demand(1.0, [](int) { return 1.0; }).value - 1.0) < 1e-12);
  }
  SUBCASE("complement of the empty store")
  {
    double const v = expect_over_demand(1.0, [](int) { return 1.0; }, {}, 1).value;
    CHECK(v == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  }
  SUBCASE("geometric weights collapse to a thinned Poisson")
  {
    double const theta = 0.5;
    double const b     = 0.5;
    double const v =
        expect_over_demand(2.0, [&](int n) { return std::pow(theta, n) * (1.0 - b); }).value;
    // sum_n z_n(2) 0.5^n = e^{-1}
    CHECK(v == doctest::Approx(std::exp(-1.0) * 0.5).epsilon(1e-12));
    double const e = std::exp(-1.0);
    // with the n = 0 term removed: e^{-1}(1 - e^{-1}) (1 - b)
    double const tail =
        expect_over_demand(2.0, [&](int n) { return std::pow(theta, n) * (1.0 - b); }, {}, 1).value;
    CHECK(tail == doctest::Approx(std::exp(-2.0) * (std::exp(1.0) - 1.0) * 0.5).epsilon(1e-12));
    CHECK(tail == doctest::Approx(e * (1.0 - e) * 0.5).epsilon(1e-12));
  }
}

TEST_CASE("property: series is linear in f")
{
  gen::Source src(13);
  for (int i = 0; i < 100; ++i)
  {
    double const x = src.uniform(0.0, 15.0);
    double const a = src.uniform(-1.0, 1.0);
    double const c = src.uniform(-1.0, 1.0);
    double const q = src.uniform(0.0, 1.0);
    auto f = [&](int n) { return std::pow(q, n); };
    auto g = [&](int n) { return n % 2 == 0 ? 1.0 : -1.0; };
    double const lhs = expect_over_demand(x, [&](int n) { return 0.5 * (a * f(n) + c * g(n)); }).value;
    double const rhs = 0.5 * (a * expect_over_demand(x, f).value + c * expect_over_demand(x, g).value);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("series agrees with an explicit sum")
{
  for (double x : {0.2, 1.0, 7.0, 19.0})
  {
    auto f = [](int n) { return 1.0 / (1.0 + n); };
    CHECK(expect_over_demand(x, f).value == doctest::Approx(oracle::poisson_sum(x, f)).epsilon(1e-12));
  }
}

TEST_CASE("series truncation error carries the residual bound")
{
  SeriesPolicy tight;
  tight.max_terms = 3;
  try
  {
    (void)expect_over_demand(10.0, [](int) { return 1.0; }, tight);
    FAIL("expected a truncation error");
  }
  catch (allpay::TruncationError const &e)
  {
    CHECK(e.residual_bound() > tight.tail_tolerance);
  }
}

TEST_CASE("series policy is validated")
{
  SeriesPolicy bad;
  bad.tail_tolerance = 0.0;
  CHECK_THROWS_AS(expect_over_demand(1.0, [](int) { return 1.0; }, bad), allpay::DomainError);
  bad = {};
  bad.max_terms = 1;
  CHECK_THROWS_AS(expect_over_demand(1.0, [](int) { return 1.0; }, bad), allpay::DomainError);
}
