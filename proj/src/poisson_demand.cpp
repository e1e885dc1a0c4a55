#include "allpay/poisson_demand.hpp"

#include "allpay/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace allpay::poisson {
namespace {

constexpr int kTableSize = 1024;

// log(n!) for small n. Built once; std::lgamma is avoided on the hot path
// because glibc writes the global signgam.
const std::array<double, kTableSize> &log_factorials()
{
  static const std::array<double, kTableSize> table = [] {
    std::array<double, kTableSize> t{};
    t[0] = 0.0;
    for (int k = 1; k < kTableSize; ++k)
    {
      t[k] = t[k - 1] + std::log(static_cast<double>(k));
    }
    return t;
  }();
  return table;
}

double log_factorial(int n)
{
  if (n < kTableSize)
  {
    return log_factorials()[static_cast<std::size_t>(n)];
  }
  // Stirling series; relative error far below double precision for n >= 1024.
  double const m = static_cast<double>(n);
  return m * std::log(m) - m + 0.5 * std::log(2.0 * M_PI * m) + 1.0 / (12.0 * m) -
         1.0 / (360.0 * m * m * m);
}

void check_rate(double x)
{
  if (!(x >= 0.0) || !std::isfinite(x))
  {
    throw DomainError("Poisson rate must be finite and nonnegative, got " + std::to_string(x));
  }
}

}  // namespace

void SeriesPolicy::validate() const
{
  if (!(tail_tolerance > 0.0))
  {
    throw DomainError("series tail tolerance must be positive");
  }
  if (max_terms < 2)
  {
    throw DomainError("series max_terms must be at least 2");
  }
}

double z(int n, double x)
{
  if (n < 0)
  {
    throw DomainError("Poisson count must be nonnegative, got " + std::to_string(n));
  }
  check_rate(x);

  if (x == 0.0)
  {
    return n == 0 ? 1.0 : 0.0;
  }
  if (n == 0)
  {
    return std::exp(-x);
  }
  if (n == 1)
  {
    return x * std::exp(-x);
  }
  return std::exp(-x + static_cast<double>(n) * std::log(x) - log_factorial(n));
}

double tail_bound(int last, double x)
{
  check_rate(x);
  if (x == 0.0)
  {
    return last >= 0 ? 0.0 : 1.0;
  }
  double const ratio = x / static_cast<double>(last + 2);
  if (ratio >= 1.0)
  {
    return std::numeric_limits<double>::infinity();
  }
  return z(last + 1, x) / (1.0 - ratio);
}

SeriesResult expect_over_demand(double x, const std::function<double(int)> &f,
                                const SeriesPolicy &policy, int start)
{
  check_rate(x);
  policy.validate();
  if (start < 0)
  {
    throw DomainError("series start index must be nonnegative");
  }

  SeriesResult result;
  double       compensation = 0.0;
  double       bound        = std::numeric_limits<double>::infinity();

  for (int n = start; result.terms < policy.max_terms; ++n)
  {
    double const weight = z(n, x);
    double const term   = weight * f(n);

    // Neumaier summation
    double const t = result.value + term;
    if (std::abs(result.value) >= std::abs(term))
    {
      compensation += (result.value - t) + term;
    }
    else
    {
      compensation += (term - t) + result.value;
    }
    result.value = t;
    ++result.terms;

    bound = tail_bound(n, x);
    if (bound < policy.tail_tolerance)
    {
      result.value += compensation;
      result.error_bound = bound;
      return result;
    }
  }

  throw TruncationError("Poisson series did not converge within " +
                            std::to_string(policy.max_terms) + " terms at x = " +
                            std::to_string(x),
                        bound);
}

}  // namespace allpay::poisson
