#pragma once

#include <functional>

namespace allpay::poisson {

// Controls truncation of infinite sums over Poisson demand.
struct SeriesPolicy
{
  double tail_tolerance = 1e-12;
  int    max_terms      = 512;

  void validate() const;
};

struct SeriesResult
{
  double value       = 0.0;
  double error_bound = 0.0;  // bound on the omitted tail, assuming |f| <= 1
  int    terms       = 0;
};

// Probability that a store with expected arrivals x meets exactly n buyers:
// e^{-x} x^n / n!. Evaluated in log space for n >= 2.
double z(int n, double x);

// Upper bound on sum_{k > last} z(k, x). Infinite when the geometric ratio
// bound x / (last + 2) is not below one.
double tail_bound(int last, double x);

// sum_{n >= start} z(n, x) f(n), stopping once the Poisson tail beyond the
// last included term is below policy.tail_tolerance. Every payoff in the
// model lies in [-1, 1], so the tail mass bounds the truncation error.
// Throws TruncationError if max_terms is exhausted first.
SeriesResult expect_over_demand(double x, const std::function<double(int)> &f,
                                const SeriesPolicy &policy = {}, int start = 0);

}  // namespace allpay::poisson
