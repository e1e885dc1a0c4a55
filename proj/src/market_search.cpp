#include "allpay/market_search.hpp"

#include "allpay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace allpay {
namespace {

using poisson::z;

constexpr int    kBisectionCap     = 200;
constexpr double kMaxDemand        = 600.0;
constexpr double kUtilityTolerance = 1e-14;
constexpr double kSlackTolerance   = 1e-12;
constexpr int    kReserveGrid      = 2001;

void check_budget(double b)
{
  if (!(b > 0.0 && b < 1.0))
  {
    throw DomainError("b must lie in (0,1), got " + std::to_string(b));
  }
}

// (1 - z_0(y) - z_1(y)) / y, with the positive series
// e^{-y} sum_{m >= 2} y^{m-1} / m! near zero.
double pair_share(double y)
{
  if (y == 0.0)
  {
    return 0.0;
  }
  if (y < 1.0)
  {
    double term = y / 2.0;
    double sum  = term;
    for (int m = 3; m < 40 && term > 1e-18 * sum; ++m)
    {
      term *= y / m;
      sum += term;
    }
    return std::exp(-y) * sum;
  }
  return (-std::expm1(-y) - y * std::exp(-y)) / y;
}

double allpay_high(double theta, int n, double b)
{
  return std::max(std::pow(theta, n - 1) - b, 0.0);
}

double allpay_low(double theta, int n, double b)
{
  return std::max(std::pow(theta, n - 1) / n - b, 0.0);
}

// sum_{n >= 1} z_n(x) u_ap(n + 1): the part of all-pay utility earned when
// the buyer is not alone.
BuyerUtilities allpay_contest_terms(double x, double theta, double b,
                                    poisson::SeriesPolicy const &policy)
{
  if (b >= theta || x == 0.0)
  {
    return {};
  }
  auto high = poisson::expect_over_demand(
      x, [&](int n) { return allpay_high(theta, n + 1, b); }, policy, 1);
  auto low = poisson::expect_over_demand(
      x, [&](int n) { return allpay_low(theta, n + 1, b); }, policy, 1);
  return {high.value, low.value};
}

// x solving U(x) = omega on [0, kMaxDemand]; 0 if the type is not served
// even at vanishing demand, +inf if U never drops to omega.
template <typename Utility>
double demand_for(Utility const &utility, double omega)
{
  auto excess = [&](double x) { return utility(x) - omega; };
  if (excess(0.0) <= 0.0)
  {
    return 0.0;
  }
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0)
  {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxDemand)
    {
      return std::numeric_limits<double>::infinity();
    }
  }
  for (int it = 0; it < kBisectionCap; ++it)
  {
    double const mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
    {
      break;
    }
    double const e = excess(mid);
    if (std::abs(e) < kUtilityTolerance)
    {
      return mid;
    }
    (e > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MarketParams::MarketParams(double lambda, double sigma, double budget)
  : lambda_(lambda)
  , sigma_(sigma)
  , budget_(budget)
{
  if (!(lambda > 0.0) || !std::isfinite(lambda))
  {
    throw DomainError("lambda must be positive and finite, got " + std::to_string(lambda));
  }
  if (!(sigma >= 0.0 && sigma <= 1.0))
  {
    throw DomainError("sigma must lie in [0,1], got " + std::to_string(sigma));
  }
  check_budget(budget);
}

MechanismPosting::MechanismPosting(AuctionFormat f, double r)
  : format(f)
  , reserve(r)
{
  if (!std::isfinite(r) || r > 1.0)
  {
    throw DomainError("reserve must be finite and at most 1, got " + std::to_string(r));
  }
}

DemandResponse::DemandResponse(double x_h, double x_l)
  : x_h_(x_h)
  , x_l_(x_l)
{
  if (!(x_h >= 0.0 && x_l >= 0.0) || !std::isfinite(x_h) || !std::isfinite(x_l))
  {
    throw DomainError("arrival rates must be finite and nonnegative");
  }
}

DemandResponse DemandResponse::from_rates(double x_h, double x_l)
{
  return {x_h, x_l};
}

DemandResponse DemandResponse::from_composition(double total, double theta)
{
  if (!(theta >= 0.0 && theta <= 1.0))
  {
    throw DomainError("theta must lie in [0,1], got " + std::to_string(theta));
  }
  return {(1.0 - theta) * total, theta * total};
}

double DemandResponse::theta() const
{
  double const x = total();
  return x > 0.0 ? x_l_ / x : 0.0;
}

BuyerUtilities utilities(MechanismPosting const &posting, DemandResponse const &demand,
                         double budget, poisson::SeriesPolicy const &policy)
{
  check_budget(budget);
  double const x     = demand.total();
  double const alone = z(0, x) * (1.0 - posting.reserve);

  if (is_standard(posting.format))
  {
    double const x_h     = demand.x_h();
    double const x_l     = demand.x_l();
    double const no_high = z(0, x_h);
    return {
        alone + no_high * (-std::expm1(-x_l)) * (1.0 - budget),
        alone + no_high * pair_share(x_l) * (1.0 - budget),
    };
  }

  auto const contest = allpay_contest_terms(x, demand.theta(), budget, policy);
  return {alone + contest.high, alone + contest.low};
}

double profit_direct(MechanismPosting const &posting, DemandResponse const &demand, double budget,
                     poisson::SeriesPolicy const &policy)
{
  check_budget(budget);
  double const x = demand.total();
  if (x == 0.0)
  {
    return 0.0;
  }
  double const r         = posting.reserve;
  double const lone_sale = z(1, x) * r;

  if (is_standard(posting.format))
  {
    double const x_h      = demand.x_h();
    double const few_high = z(0, x_h) + z(1, x_h);
    double const few_all  = z(0, x) + z(1, x);
    return lone_sale + 1.0 - few_high + budget * (few_high - few_all);
  }

  double const theta = demand.theta();
  if (budget >= theta)
  {
    // every auction with n >= 2 extracts the full unit of surplus
    return lone_sale + 1.0 - z(0, x) - z(1, x);
  }
  auto auctions = poisson::expect_over_demand(
      x, [&](int n) { return allpay_payoffs(AuctionScene(n, theta, budget)).pi; }, policy, 2);
  return lone_sale + auctions.value;
}

double profit_identity_residual(MechanismPosting const &posting, DemandResponse const &demand,
                                double budget)
{
  auto const   u    = utilities(posting, demand, budget);
  double const cost = demand.x_h() * u.high + demand.x_l() * u.low;
  return profit_direct(posting, demand, budget) - (1.0 - z(0, demand.total()) - cost);
}

DemandResponse solve_demand(MechanismPosting const &posting, double omega_h, double omega_l,
                            double budget)
{
  check_budget(budget);
  for (double omega : {omega_h, omega_l})
  {
    if (!(omega > 0.0 && omega <= 1.0))
    {
      throw DomainError("market utility must lie in (0, 1], got " + std::to_string(omega));
    }
  }

  double const served_alone = 1.0 - posting.reserve;
  bool const   wants_high   = served_alone > omega_h;
  bool const   wants_low    = served_alone > omega_l;
  if (!wants_high && !wants_low)
  {
    return DemandResponse::from_rates(0.0, 0.0);
  }

  auto at = [&](double x, double theta) {
    return utilities(posting, DemandResponse::from_composition(x, theta), budget);
  };
  auto high_demand = [&](double theta) {
    return demand_for([&](double x) { return at(x, theta).high; }, omega_h);
  };
  auto low_demand = [&](double theta) {
    return demand_for([&](double x) { return at(x, theta).low; }, omega_l);
  };

  // Only high types: theta = 0, low types weakly prefer the market.
  if (wants_high)
  {
    double const x = high_demand(0.0);
    if (std::isfinite(x) && at(x, 0.0).low <= omega_l + kSlackTolerance)
    {
      return DemandResponse::from_composition(x, 0.0);
    }
  }
  // Only low types: theta = 1, high types weakly prefer the market.
  if (wants_low)
  {
    double const x = low_demand(1.0);
    if (std::isfinite(x) && at(x, 1.0).high <= omega_h + kSlackTolerance)
    {
      return DemandResponse::from_composition(x, 1.0);
    }
  }
  // Both types: the composition where both indifference curves meet. Each
  // x_i(theta) rises in theta, and the high curve overtakes the low one.
  if (wants_high && wants_low)
  {
    auto gap = [&](double theta) { return high_demand(theta) - low_demand(theta); };
    double lo = 0.0;
    double hi = 1.0;
    if (gap(lo) <= 0.0 && gap(hi) > 0.0)
    {
      for (int it = 0; it < kBisectionCap; ++it)
      {
        double const mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
        {
          break;
        }
        (gap(mid) > 0.0 ? hi : lo) = mid;
      }
      double const theta = 0.5 * (lo + hi);
      double const x     = low_demand(theta);
      auto const   u     = at(x, theta);
      if (std::isfinite(x) && std::abs(u.high - omega_h) < 1e-10 &&
          std::abs(u.low - omega_l) < 1e-10)
      {
        return DemandResponse::from_composition(x, theta);
      }
    }
  }
  throw ConvergenceError("no arrival rates satisfy the market-utility conditions");
}

MarketEquilibrium allpay_symmetric_equilibrium(MarketParams const &params)
{
  if (!(params.budget() > params.sigma()))
  {
    throw HypothesisViolated("all-pay equilibrium is characterized only for b > sigma");
  }
  double const lambda = params.lambda();
  auto const   demand = DemandResponse::from_rates(params.high_rate(), params.low_rate());

  // Seller's problem max_x 1 - z_0(x) - x Omega has first-order condition
  // z_0(x) = Omega; symmetric visiting puts x = lambda at every store.
  double const omega = z(0, lambda);

  // Reserve delivering Omega at x = lambda. Utility falls in r.
  auto excess = [&](double r) {
    return utilities(MechanismPosting(AuctionFormat::all_pay, r), demand, params.budget()).high -
           omega;
  };
  double reserve = 0.0;
  if (excess(0.0) > 0.0)
  {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < kBisectionCap && hi - lo > 1e-16; ++it)
    {
      double const mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    reserve = 0.5 * (lo + hi);
  }

  MarketEquilibrium eq;
  eq.omega_h      = omega;
  eq.omega_l      = omega;
  eq.reserve_star = reserve;
  eq.profit =
      profit_direct(MechanismPosting(AuctionFormat::all_pay, reserve), demand, params.budget());
  eq.format = AuctionFormat::all_pay;
  return eq;
}

StandardDeviation standard_deviation_check(MarketParams const &params)
{
  auto const   eq = allpay_symmetric_equilibrium(params);
  double const b  = params.budget();

  struct Point
  {
    double         profit;
    DemandResponse demand;
  };
  auto evaluate = [&](double r) {
    MechanismPosting const posting(AuctionFormat::first_price, r);
    auto demand = solve_demand(posting, eq.omega_h, eq.omega_l, b);
    return Point{profit_direct(posting, demand, b), demand};
  };

  int    best_index  = 0;
  double best_profit = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kReserveGrid; ++i)
  {
    double const r = static_cast<double>(i) / (kReserveGrid - 1);
    double const p = evaluate(r).profit;
    if (p > best_profit)
    {
      best_profit = p;
      best_index  = i;
    }
  }

  // Golden-section refinement on the neighbouring cells.
  double lo = std::max(0, best_index - 1) / static_cast<double>(kReserveGrid - 1);
  double hi = std::min(kReserveGrid - 1, best_index + 1) / static_cast<double>(kReserveGrid - 1);
  double const inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double       a       = hi - inv_phi * (hi - lo);
  double       c       = lo + inv_phi * (hi - lo);
  double       fa      = evaluate(a).profit;
  double       fc      = evaluate(c).profit;
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it)
  {
    if (fa >= fc)
    {
      hi = c;
      c  = a;
      fc = fa;
      a  = hi - inv_phi * (hi - lo);
      fa = evaluate(a).profit;
    }
    else
    {
      lo = a;
      a  = c;
      fa = fc;
      c  = lo + inv_phi * (hi - lo);
      fc = evaluate(c).profit;
    }
  }

  double best_reserve = static_cast<double>(best_index) / (kReserveGrid - 1);
  for (double r : {lo, hi, 0.5 * (lo + hi)})
  {
    double const p = evaluate(r).profit;
    if (p > best_profit)
    {
      best_profit  = p;
      best_reserve = r;
    }
  }

  auto const        at_best = evaluate(best_reserve);
  StandardDeviation out;
  out.best_reserve       = best_reserve;
  out.best_profit        = best_profit;
  out.equilibrium_profit = eq.profit;
  out.gain               = best_profit - eq.profit;
  out.x_h                = at_best.demand.x_h();
  out.x_l                = at_best.demand.x_l();
  return out;
}

std::string_view to_string(DeviationStatus s)
{
  switch (s)
  {
  case DeviationStatus::ok:
    return "ok";
  case DeviationStatus::subsidy_required:
    return "subsidy_required";
  case DeviationStatus::infeasible:
    return "infeasible";
  case DeviationStatus::degenerate:
    return "degenerate";
  }
  return "unknown";
}

AllPayDeviation allpay_deviation_from_standard(MarketParams const &params, double r_s)
{
  if (!(r_s >= 0.0 && r_s <= 1.0))
  {
    throw DomainError("standard reserve must lie in [0,1], got " + std::to_string(r_s));
  }
  double const lambda = params.lambda();
  double const sigma  = params.sigma();
  double const b      = params.budget();

  MechanismPosting const standard(AuctionFormat::first_price, r_s);
  auto const             standard_demand = DemandResponse::from_rates(params.high_rate(), params.low_rate());
  auto const             u_s             = utilities(standard, standard_demand, b);

  AllPayDeviation out;
  out.u_h_standard    = u_s.high;
  out.u_l_standard    = u_s.low;
  out.profit_standard = profit_direct(standard, standard_demand, b);
  out.theta_hat       = sigma;
  out.r_hat           = r_s;

  if (sigma <= 0.0 || sigma >= 1.0)
  {
    out.status = DeviationStatus::degenerate;
    return out;
  }

  // r enters both all-pay utilities through the common z_0(lambda)(1 - r),
  // so the payoff gap pins theta alone. The gap is nondecreasing in theta.
  double const target_gap = u_s.high - u_s.low;
  poisson::SeriesPolicy const policy;
  auto contest_gap = [&](double theta) {
    auto const t = allpay_contest_terms(lambda, theta, b, policy);
    return t.high - t.low;
  };
  if (contest_gap(1.0) < target_gap)
  {
    out.status = DeviationStatus::infeasible;
    return out;
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < kBisectionCap; ++it)
  {
    double const mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
    {
      break;
    }
    (contest_gap(mid) < target_gap ? lo : hi) = mid;
  }
  double const theta_hat = hi;
  auto const   contest   = allpay_contest_terms(lambda, theta_hat, b, policy);
  double const r_hat     = 1.0 - (u_s.low - contest.low) / z(0, lambda);

  out.theta_hat   = theta_hat;
  out.r_hat       = r_hat;
  out.profit_gain = lambda * (theta_hat - sigma) * target_gap;

  MechanismPosting const allpay(AuctionFormat::all_pay, std::min(r_hat, 1.0));
  auto const             allpay_demand = DemandResponse::from_composition(lambda, theta_hat);
  auto const             u_a           = utilities(allpay, allpay_demand, b);
  out.equation_residual =
      std::max(std::abs(u_a.high - u_s.high), std::abs(u_a.low - u_s.low));
  out.profit_allpay      = profit_direct(allpay, allpay_demand, b);
  out.profit_gain_direct = out.profit_allpay - out.profit_standard;
  out.status = r_hat < 0.0 ? DeviationStatus::subsidy_required : DeviationStatus::ok;
  return out;
}

}  // namespace allpay
