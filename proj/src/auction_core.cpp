#include "allpay/auction_core.hpp"

#include "allpay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace allpay {
namespace {

constexpr double kAtomResidualTolerance = 1e-12;
constexpr int    kBisectionCap          = 200;

// (1 - (1 - mu)^n) / mu, stable for small mu.
double atom_tie_factor(int n, double mu)
{
  return -std::expm1(static_cast<double>(n) * std::log1p(-mu)) / mu;
}

void require_interior_theta(AuctionScene const &scene, char const *what)
{
  if (scene.theta() <= 0.0 || scene.theta() >= 1.0)
  {
    throw DegenerateComposition(std::string(what) + " requires theta in (0, 1), got " +
                                std::to_string(scene.theta()));
  }
}

// ((p + shift)^{1/k} - theta) / (1 - theta) on [lower, upper]
PowerSegment high_segment(double theta, int k, double shift, double lower, double upper)
{
  return PowerSegment{lower, upper, -theta / (1.0 - theta), 1.0 / (1.0 - theta), 1.0, shift,
                      1.0 / k};
}

// p^{1/k} / theta on [0, upper]
PowerSegment low_segment(double theta, int k, double upper)
{
  return PowerSegment{0.0, upper, 0.0, 1.0 / theta, 1.0, 0.0, 1.0 / k};
}

}  // namespace

std::string_view to_string(AuctionFormat f)
{
  switch (f)
  {
  case AuctionFormat::first_price:
    return "first_price";
  case AuctionFormat::second_price:
    return "second_price";
  case AuctionFormat::all_pay:
    return "all_pay";
  }
  return "unknown";
}

AuctionFormat parse_format(std::string_view text)
{
  if (text == "first" || text == "first_price" || text == "standard")
  {
    return AuctionFormat::first_price;
  }
  if (text == "second" || text == "second_price")
  {
    return AuctionFormat::second_price;
  }
  if (text == "allpay" || text == "all_pay")
  {
    return AuctionFormat::all_pay;
  }
  throw DomainError("unknown auction format '" + std::string(text) +
                    "' (expected allpay, first, second or standard)");
}

std::string_view to_string(Region r)
{
  switch (r)
  {
  case Region::r1:
    return "R1";
  case Region::r2:
    return "R2";
  case Region::r3:
    return "R3";
  }
  return "unknown";
}

AuctionScene::AuctionScene(int bidders, double theta, double budget)
  : bidders_(bidders)
  , theta_(theta)
  , budget_(budget)
{
  if (bidders < 2)
  {
    throw DomainError("an auction needs n >= 2 bidders, got " + std::to_string(bidders));
  }
  if (!(theta >= 0.0 && theta <= 1.0))
  {
    throw DomainError("theta must lie in [0,1], got " + std::to_string(theta));
  }
  if (!(budget > 0.0 && budget < 1.0))
  {
    throw DomainError("b must lie in (0,1), got " + std::to_string(budget));
  }
}

double AuctionScene::all_rivals_low() const
{
  return std::pow(theta_, bidders_ - 1);
}

RegionInfo classify_region(AuctionScene const &scene)
{
  double const t = scene.all_rivals_low();
  double const pool = t / scene.bidders();
  double const b    = scene.budget();
  Region       tag  = Region::r3;
  if (b < pool)
  {
    tag = Region::r1;
  }
  else if (b < t)
  {
    tag = Region::r2;
  }
  return {tag, pool, t};
}

PayoffTriple standard_payoffs(AuctionScene const &scene)
{
  int const    n     = scene.bidders();
  double const theta = scene.theta();
  double const b     = scene.budget();
  double const t     = scene.all_rivals_low();

  // Probability that at most one of the n bidders is a high type.
  double const at_most_one_high = std::pow(theta, n) + n * t * (1.0 - theta);

  PayoffTriple out;
  out.u_h = t * (1.0 - b);
  out.u_l = out.u_h / n;
  out.pi  = at_most_one_high * b + 1.0 - at_most_one_high;
  return out;
}

PayoffTriple allpay_payoffs(AuctionScene const &scene)
{
  int const    n     = scene.bidders();
  double const theta = scene.theta();
  double const b     = scene.budget();
  double const t     = scene.all_rivals_low();

  PayoffTriple out;
  out.u_h = std::max(t - b, 0.0);
  out.u_l = std::max(t / n - b, 0.0);
  out.pi  = 1.0 - n * ((1.0 - theta) * out.u_h + theta * out.u_l);
  return out;
}

double surplus_residual(AuctionScene const &scene, PayoffTriple const &payoffs)
{
  double const theta = scene.theta();
  return payoffs.pi + scene.bidders() * ((1.0 - theta) * payoffs.u_h + theta * payoffs.u_l) - 1.0;
}

double solve_atom_mu(AuctionScene const &scene)
{
  if (classify_region(scene).tag != Region::r2)
  {
    throw RegionError("atom size is defined only in region R2");
  }
  int const    n      = scene.bidders();
  double const target = scene.budget() * n / scene.all_rivals_low();

  // residual rises strictly in mu: the tie factor falls from n to 1 on (0, 1]
  auto residual = [&](double mu) { return target - atom_tie_factor(n, mu); };

  if (residual(1.0) <= 0.0)
  {
    return 1.0;  // b on the R1/R2 boundary: the whole mass sits at b
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
    double const r = residual(mid);
    if (std::abs(r) < kAtomResidualTolerance)
    {
      return mid;
    }
    (r < 0.0 ? lo : hi) = mid;
  }
  double const mid = 0.5 * (lo + hi);
  if (std::abs(residual(mid)) < kAtomResidualTolerance)
  {
    return mid;
  }
  throw ConvergenceError("atom equation did not converge to 1e-12");
}

AllPayProfile allpay_bid_cdfs(AuctionScene const &scene)
{
  require_interior_theta(scene, "all-pay bid CDFs");
  int const    k     = scene.bidders() - 1;
  double const theta = scene.theta();
  double const b     = scene.budget();
  double const t     = scene.all_rivals_low();

  if (classify_region(scene).tag == Region::r3)
  {
    return AllPayProfile{
        BidDistribution({high_segment(theta, k, 0.0, t, 1.0)}, {}),
        BidDistribution({low_segment(theta, k, t)}, {}),
    };
  }
  return AllPayProfile{
      BidDistribution({high_segment(theta, k, t - b, b, 1.0 - t + b)}, {}),
      allpay_low_cdf(scene),
  };
}

BidDistribution high_types_only_cdf(int bidders)
{
  if (bidders < 2)
  {
    throw DomainError("an auction needs n >= 2 bidders");
  }
  return BidDistribution({PowerSegment{0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0 / (bidders - 1)}}, {});
}

BidDistribution allpay_low_cdf(AuctionScene const &scene)
{
  if (scene.theta() <= 0.0)
  {
    throw DegenerateComposition("low-type strategy undefined at theta = 0");
  }
  int const    k     = scene.bidders() - 1;
  double const theta = scene.theta();
  double const b     = scene.budget();
  double const t     = scene.all_rivals_low();

  switch (classify_region(scene).tag)
  {
  case Region::r1:
    return BidDistribution::point_mass(b);
  case Region::r2:
  {
    double const mu    = solve_atom_mu(scene);
    double const p_bar = t * std::pow(1.0 - mu, k);
    return BidDistribution({low_segment(theta, k, p_bar)}, {Atom{b, mu}});
  }
  case Region::r3:
    break;
  }
  return BidDistribution({low_segment(theta, k, t)}, {});
}

double eu_of_bid(double p, AllPayProfile const &profile, AuctionScene const &scene)
{
  if (!(p >= 0.0 && p <= 1.0))
  {
    throw DomainError("bid must lie in [0, 1]");
  }
  if (profile.high.atom_mass_at(p) > 0.0 || profile.low.atom_mass_at(p) > 0.0)
  {
    throw DomainError("bid " + std::to_string(p) + " is an atom; use atom_payoff");
  }
  double const theta = scene.theta();
  double const g     = theta * profile.low.eval(p) + (1.0 - theta) * profile.high.eval(p);
  return std::pow(g, scene.bidders() - 1) - p;
}

double atom_payoff(AuctionScene const &scene, double mu)
{
  if (!(mu > 0.0 && mu <= 1.0))
  {
    throw DomainError("atom mass must lie in (0, 1], got " + std::to_string(mu));
  }
  int const n = scene.bidders();
  return scene.all_rivals_low() * atom_tie_factor(n, mu) / n - scene.budget();
}

double bid_payoff(double p, AllPayProfile const &profile, AuctionScene const &scene)
{
  int const    n     = scene.bidders();
  double const theta = scene.theta();
  double const below = theta * profile.low.eval_left(p) + (1.0 - theta) * profile.high.eval_left(p);
  double const tied =
      theta * profile.low.atom_mass_at(p) + (1.0 - theta) * profile.high.atom_mass_at(p);

  double win = 0.0;
  if (tied > 0.0)
  {
    // sum_j C(n-1, j) tied^j below^{n-1-j} / (j + 1)
    win = (std::pow(below + tied, n) - std::pow(below, n)) / (n * tied);
  }
  else
  {
    win = std::pow(below, n - 1);
  }
  return win - p;
}

BestResponseGap best_response_gap(AllPayProfile const &profile, AuctionScene const &scene,
                                  int grid_size)
{
  if (grid_size < 1000)
  {
    throw DomainError("best-response grid needs at least 1000 points");
  }
  double const b = scene.budget();

  std::vector<double> special;
  for (auto const *dist : {&profile.high, &profile.low})
  {
    for (auto const &a : dist->atoms())
    {
      special.push_back(a.location);
      special.push_back(std::nextafter(a.location, 2.0));
    }
    for (auto const &s : dist->segments())
    {
      special.push_back(s.lower);
      special.push_back(s.upper);
    }
  }
  special.push_back(b);

  auto best_on = [&](double cap) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= grid_size; ++j)
    {
      double const p = static_cast<double>(j) / grid_size;
      if (p > cap)
      {
        break;
      }
      best = std::max(best, bid_payoff(p, profile, scene));
    }
    for (double p : special)
    {
      if (p >= 0.0 && p <= cap)
      {
        best = std::max(best, bid_payoff(p, profile, scene));
      }
    }
    return best;
  };

  // Midpoint rule over quantile levels.
  auto value_of = [&](BidDistribution const &own) {
    double sum = 0.0;
    for (int j = 0; j < grid_size; ++j)
    {
      double const u = (j + 0.5) / grid_size;
      sum += bid_payoff(own.quantile(u), profile, scene);
    }
    return sum / grid_size;
  };

  BestResponseGap out;
  out.tolerance = 2.0 / grid_size;
  out.best_h    = best_on(1.0);
  out.value_h   = value_of(profile.high);
  out.gap_h     = out.best_h - out.value_h;
  out.best_l    = best_on(b);
  out.value_l   = value_of(profile.low);
  out.gap_l     = out.best_l - out.value_l;
  return out;
}

double expected_bid(BidDistribution const &dist)
{
  return dist.mean();
}

BidDistribution firstprice_high_cdf(AuctionScene const &scene)
{
  require_interior_theta(scene, "first-price high-type CDF");
  int const    k     = scene.bidders() - 1;
  double const b     = scene.budget();
  double const upper = 1.0 - (1.0 - b) * scene.all_rivals_low();

  // F = c * ((1 - p)^{-1/k} - (1 - b)^{-1/k}); c = ((1-b)t)^{1/k} / (1 - theta)
  // analytically, taken here from the endpoint condition F(upper) = 1 so
  // that rounding in a tiny (1-b)t cannot break normalization.
  double const at_lower = std::pow(1.0 - b, -1.0 / k);
  double const at_upper = std::pow(1.0 - upper, -1.0 / k);
  double const scale    = 1.0 / (at_upper - at_lower);
  PowerSegment s{b, upper, -scale * at_lower, scale, -1.0, 1.0, -1.0 / k};
  return BidDistribution({s}, {});
}

}  // namespace allpay
