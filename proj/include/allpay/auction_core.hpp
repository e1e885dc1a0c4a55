#pragma once

#include "allpay/bid_distribution.hpp"

#include <string_view>

namespace allpay {

enum class AuctionFormat
{
  first_price,
  second_price,
  all_pay,
};

// First- and second-price auctions are payoff equivalent here; the market
// layer treats both as "standard".
constexpr bool is_standard(AuctionFormat f)
{
  return f != AuctionFormat::all_pay;
}

std::string_view to_string(AuctionFormat f);
AuctionFormat    parse_format(std::string_view text);

// One store's bidding subgame: n bidders (including self), each rival low
// type with probability theta, low types capped at budget b.
class AuctionScene
{
public:
  AuctionScene(int bidders, double theta, double budget);

  int bidders() const
  {
    return bidders_;
  }
  double theta() const
  {
    return theta_;
  }
  double budget() const
  {
    return budget_;
  }

  // theta^{n-1}: probability that every rival is a low type.
  double all_rivals_low() const;

private:
  int    bidders_;
  double theta_;
  double budget_;
};

enum class Region
{
  r1,  // b < theta^{n-1}/n: low types pool at b
  r2,  // theta^{n-1}/n <= b < theta^{n-1}: low types mix with an atom at b
  r3,  // theta^{n-1} <= b: seller extracts the whole surplus
};

std::string_view to_string(Region r);

struct RegionInfo
{
  Region tag;
  double pooling_threshold;     // theta^{n-1} / n
  double extraction_threshold;  // theta^{n-1}
};

struct PayoffTriple
{
  double u_h = 0.0;
  double u_l = 0.0;
  double pi  = 0.0;
};

struct AllPayProfile
{
  BidDistribution high;
  BidDistribution low;
};

RegionInfo classify_region(AuctionScene const &scene);

// Low types bid b; high types randomize (first price) or bid 1 (second price).
PayoffTriple standard_payoffs(AuctionScene const &scene);

// Payoffs of the symmetric all-pay equilibrium; revenue from the surplus
// identity pi = 1 - n[(1 - theta) u_h + theta u_l].
PayoffTriple allpay_payoffs(AuctionScene const &scene);

// pi + n[(1 - theta) u_h + theta u_l] - 1
double surplus_residual(AuctionScene const &scene, PayoffTriple const &payoffs);

// Atom mu at b solving  b n / theta^{n-1} = (1 - (1 - mu)^n) / mu.
// Requires a region-2 scene; bisection to |residual| < 1e-12.
double solve_atom_mu(AuctionScene const &scene);

// Equilibrium bid CDFs of the all-pay auction for theta in (0, 1). Throws
// DegenerateComposition for theta in {0, 1}.
AllPayProfile allpay_bid_cdfs(AuctionScene const &scene);

// theta = 0 limit: p^{1/(n-1)} on [0, 1].
BidDistribution high_types_only_cdf(int bidders);

// Low-type all-pay strategy; also defined at theta = 1.
BidDistribution allpay_low_cdf(AuctionScene const &scene);

// [theta G_l(p) + (1 - theta) G_h(p)]^{n-1} - p. p must not be an atom of
// either CDF.
double eu_of_bid(double p, AllPayProfile const &profile, AuctionScene const &scene);

// Payoff of bidding exactly b against an atom of size mu at b when all high
// types bid above b:  theta^{n-1} [1 - (1 - mu)^n] / (mu n) - b.
double atom_payoff(AuctionScene const &scene, double mu);

// All-pay payoff of bid p against n-1 rivals drawing from the profile, with
// ties at atoms split uniformly.
double bid_payoff(double p, AllPayProfile const &profile, AuctionScene const &scene);

struct BestResponseGap
{
  double gap_h     = 0.0;  // best grid payoff minus profile value, high type
  double gap_l     = 0.0;
  double value_h   = 0.0;  // expected payoff of playing the profile itself
  double value_l   = 0.0;
  double best_h    = 0.0;  // best payoff found on the bid grid
  double best_l    = 0.0;
  double tolerance = 0.0;  // 2 x grid spacing
};

// Grid search for profitable deviations. High types search [0, 1], low
// types [0, b]. A profile is an equilibrium up to grid resolution when both
// gaps are within `tolerance`.
BestResponseGap best_response_gap(AllPayProfile const &profile, AuctionScene const &scene,
                                  int grid_size = 100000);

double expected_bid(BidDistribution const &dist);

// High-type first-price CDF from the indifference condition
// (theta + (1 - theta) F(p))^{n-1} (1 - p) = theta^{n-1} (1 - b).
BidDistribution firstprice_high_cdf(AuctionScene const &scene);

}  // namespace allpay
