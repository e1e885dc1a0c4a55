#pragma once

#include "allpay/auction_core.hpp"
#include "allpay/poisson_demand.hpp"

#include <string_view>

namespace allpay {

// Economy-wide primitives: buyer/seller ratio, share of budget-constrained
// buyers, and their budget.
class MarketParams
{
public:
  MarketParams(double lambda, double sigma, double budget);

  double lambda() const
  {
    return lambda_;
  }
  double sigma() const
  {
    return sigma_;
  }
  double budget() const
  {
    return budget_;
  }
  double high_rate() const
  {
    return (1.0 - sigma_) * lambda_;
  }
  double low_rate() const
  {
    return sigma_ * lambda_;
  }

private:
  double lambda_;
  double sigma_;
  double budget_;
};

// What a seller advertises. A negative reserve is a subsidy to a lone
// buyer; it is representable so deviation analysis can report it.
struct MechanismPosting
{
  MechanismPosting(AuctionFormat format, double reserve);

  AuctionFormat format;
  double        reserve;
};

// Expected arrivals of each type at one store.
class DemandResponse
{
public:
  static DemandResponse from_rates(double x_h, double x_l);
  static DemandResponse from_composition(double total, double theta);

  double x_h() const
  {
    return x_h_;
  }
  double x_l() const
  {
    return x_l_;
  }
  double total() const
  {
    return x_h_ + x_l_;
  }
  // x_l / (x_h + x_l); zero for an empty store.
  double theta() const;

private:
  DemandResponse(double x_h, double x_l);

  double x_h_;
  double x_l_;
};

struct BuyerUtilities
{
  double high = 0.0;
  double low  = 0.0;
};

// Expected utility of a buyer visiting the store: sum_n z_n(x) u(n + 1).
// Standard formats use the closed forms; all-pay sums the series, which
// collapses to z_0(x)(1 - r) when b >= theta.
BuyerUtilities utilities(MechanismPosting const &posting, DemandResponse const &demand,
                         double budget, poisson::SeriesPolicy const &policy = {});

// Seller's expected profit computed from per-auction revenue.
double profit_direct(MechanismPosting const &posting, DemandResponse const &demand, double budget,
                     poisson::SeriesPolicy const &policy = {});

// profit_direct - (1 - z_0(x) - x_h U_h - x_l U_l). Zero up to rounding for
// every format: revenue equals trade surplus minus what buyers keep.
double profit_identity_residual(MechanismPosting const &posting, DemandResponse const &demand,
                                double budget);

// Arrival rates a posting attracts given market utilities: a type comes
// (x_i > 0) only if the store delivers exactly Omega_i, otherwise stays
// away. Returns (0, 0) when neither type can be served at Omega.
DemandResponse solve_demand(MechanismPosting const &posting, double omega_h, double omega_l,
                            double budget);

struct MarketEquilibrium
{
  double        omega_h      = 0.0;
  double        omega_l      = 0.0;
  double        reserve_star = 0.0;
  double        profit       = 0.0;
  AuctionFormat format       = AuctionFormat::all_pay;
};

// Symmetric equilibrium in which every seller runs an all-pay auction.
// Requires b > sigma; throws HypothesisViolated otherwise.
MarketEquilibrium allpay_symmetric_equilibrium(MarketParams const &params);

struct StandardDeviation
{
  double best_reserve       = 0.0;
  double best_profit        = 0.0;
  double equilibrium_profit = 0.0;
  double gain               = 0.0;  // best_profit - equilibrium_profit
  double x_h                = 0.0;  // demand attracted at best_reserve
  double x_l                = 0.0;
};

// Best profit a single seller can earn by switching to a standard auction
// while the rest of the market stays at the all-pay equilibrium. Scans
// reserves on a 2001-point grid and refines around the best cell.
StandardDeviation standard_deviation_check(MarketParams const &params);

enum class DeviationStatus
{
  ok,
  subsidy_required,  // matching payoffs needs a negative reserve
  infeasible,        // no composition up to theta = 1 matches the payoff gap
  degenerate,        // sigma in {0, 1}
};

std::string_view to_string(DeviationStatus s);

struct AllPayDeviation
{
  DeviationStatus status             = DeviationStatus::ok;
  double          theta_hat          = 0.0;
  double          r_hat              = 0.0;
  double          u_h_standard       = 0.0;
  double          u_l_standard       = 0.0;
  double          profit_standard    = 0.0;
  double          profit_allpay      = 0.0;
  double          profit_gain        = 0.0;  // lambda (theta_hat - sigma) (U_h,s - U_l,s)
  double          profit_gain_direct = 0.0;  // profit_allpay - profit_standard from revenue
  double          equation_residual  = 0.0;  // max |U_i,a(r_hat, lambda, theta_hat) - U_i,s|
};

// Starting from a market where every seller posts a standard auction with
// reserve r_s, find the all-pay posting (r_hat) and composition (theta_hat)
// that keep both buyer types exactly as well off at total demand lambda,
// and the resulting profit gain.
AllPayDeviation allpay_deviation_from_standard(MarketParams const &params, double r_s);

}  // namespace allpay
