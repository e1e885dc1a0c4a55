#pragma once

#include "allpay/auction_core.hpp"
#include "allpay/market_search.hpp"

#include <cstdint>
#include <string>

namespace allpay {

struct SimConfig
{
  std::int64_t  replications = 1'000'000;
  std::uint64_t seed         = 20240917;
  int           threads      = 0;  // 0: hardware concurrency

  void validate() const;
};

struct SimEstimate
{
  std::string  target;
  double       mean         = 0.0;
  double       std_error    = 0.0;
  std::int64_t replications = 0;

  // (mean - analytic) / std_error; zero-variance estimates score 0 when
  // they match to 1e-12 and infinity otherwise.
  double z_score(double analytic) const;
};

struct StoreEstimates
{
  SimEstimate u_h;
  SimEstimate u_l;
  SimEstimate pi;
  // max over simulated auctions of |revenue + sum of bidder payoffs - 1|
  double max_surplus_error = 0.0;
};

struct MarketEstimates
{
  SimEstimate u_h;
  SimEstimate u_l;
  SimEstimate profit;
  SimEstimate empty_share;  // fraction of stores with no customer
  double      max_surplus_error = 0.0;
};

// Equilibrium bidding strategies used by the simulator, covering the
// single-type compositions theta in {0, 1}. A type that never appears at
// the store still gets the strategy that attains its analytic payoff, so
// hypothetical visitors can be simulated.
struct StoreStrategies
{
  BidDistribution high;
  BidDistribution low;
};

StoreStrategies equilibrium_strategies(AuctionScene const &scene, AuctionFormat format);

// Inverse-transform draw for u in [0, 1).
double sample_bid(BidDistribution const &dist, double u);

// Simulates one store with n bidders whose rivals are low types with
// probability theta. u_h, u_l are payoffs of a bidder of each type; pi is
// seller revenue. Ties go to a uniformly chosen top bidder.
StoreEstimates simulate_store(AuctionScene const &scene, AuctionFormat format,
                              SimConfig const &config);

// Simulates Poisson arrivals at a store with the given posting and demand.
// A lone customer buys at the reserve.
MarketEstimates simulate_market(MarketParams const &params, MechanismPosting const &posting,
                                DemandResponse const &demand, SimConfig const &config);

}  // namespace allpay
