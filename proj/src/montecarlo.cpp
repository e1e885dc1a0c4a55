#include "allpay/montecarlo.hpp"

#include "allpay/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace allpay {
namespace {

constexpr std::int64_t kBlockSize = 16384;

// One independent stream per block of replications, keyed on (seed, block),
// so results do not depend on how blocks are spread over threads.
class BlockRng
{
public:
  BlockRng(std::uint64_t seed, std::uint64_t block)
  {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    engine_.seed(seq);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform()
  {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 &engine()
  {
    return engine_;
  }

private:
  std::mt19937_64 engine_;
};

// Welford accumulator; blocks are merged in index order.
struct Moments
{
  std::int64_t count = 0;
  double       mean  = 0.0;
  double       m2    = 0.0;

  void add(double x)
  {
    ++count;
    double const delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(Moments const &other)
  {
    if (other.count == 0)
    {
      return;
    }
    if (count == 0)
    {
      *this = other;
      return;
    }
    auto const   total = count + other.count;
    double const delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / static_cast<double>(total);
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / static_cast<double>(total);
    count = total;
  }

  SimEstimate estimate(std::string target) const
  {
    SimEstimate e;
    e.target       = std::move(target);
    e.mean         = mean;
    e.replications = count;
    e.std_error =
        count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count))
                  : 0.0;
    return e;
  }
};

struct Outcome
{
  double revenue     = 0.0;
  double self_payoff = 0.0;  // bidder 0
  double surplus_gap = 0.0;
};

Outcome run_auction(AuctionFormat format, std::span<double const> bids, double reserve,
                    BlockRng &rng)
{
  std::size_t const n    = bids.size();
  double const      top  = *std::max_element(bids.begin(), bids.end());
  std::size_t       ties = 0;
  for (double b : bids)
  {
    ties += b == top ? 1 : 0;
  }
  std::size_t pick   = ties > 1 ? static_cast<std::size_t>(rng.uniform() * ties) : 0;
  std::size_t winner = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    if (bids[i] == top && pick-- == 0)
    {
      winner = i;
      break;
    }
  }

  Outcome out;
  double  payoffs = 0.0;
  switch (format)
  {
  case AuctionFormat::first_price:
    out.revenue     = top;
    out.self_payoff = winner == 0 ? 1.0 - top : 0.0;
    payoffs         = 1.0 - top;
    break;
  case AuctionFormat::second_price:
  {
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
    {
      if (i != winner)
      {
        second = std::max(second, bids[i]);
      }
    }
    double const price = std::max(second, reserve);
    out.revenue        = price;
    out.self_payoff    = winner == 0 ? 1.0 - price : 0.0;
    payoffs            = 1.0 - price;
    break;
  }
  case AuctionFormat::all_pay:
    for (std::size_t i = 0; i < n; ++i)
    {
      out.revenue += bids[i];
      payoffs += (i == winner ? 1.0 : 0.0) - bids[i];
    }
    out.self_payoff = (winner == 0 ? 1.0 : 0.0) - bids[0];
    break;
  }
  out.surplus_gap = std::abs(out.revenue + payoffs - 1.0);
  return out;
}

template <typename Block>
void run_blocks(SimConfig const &config, Block &&block)
{
  auto const blocks = static_cast<std::size_t>((config.replications + kBlockSize - 1) / kBlockSize);
  detail::parallel_for(blocks, config.threads, [&](std::size_t i) {
    std::int64_t const begin = static_cast<std::int64_t>(i) * kBlockSize;
    std::int64_t const end   = std::min(config.replications, begin + kBlockSize);
    BlockRng           rng(config.seed, i);
    block(i, end - begin, rng);
  });
}

}  // namespace

void SimConfig::validate() const
{
  if (replications < 10'000)
  {
    throw DomainError("simulation needs at least 10^4 replications");
  }
}

double SimEstimate::z_score(double analytic) const
{
  double const diff = mean - analytic;
  if (std_error > 0.0)
  {
    return diff / std_error;
  }
  return std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

StoreStrategies equilibrium_strategies(AuctionScene const &scene, AuctionFormat format)
{
  double const theta = scene.theta();
  double const b     = scene.budget();
  // Bidding just above b beats every low type when all rivals are low.
  double const over_budget = std::nextafter(b, 2.0);

  if (format == AuctionFormat::all_pay)
  {
    if (theta <= 0.0)
    {
      return {high_types_only_cdf(scene.bidders()), BidDistribution::point_mass(0.0)};
    }
    if (theta >= 1.0)
    {
      return {BidDistribution::point_mass(over_budget), allpay_low_cdf(scene)};
    }
    auto profile = allpay_bid_cdfs(scene);
    return {std::move(profile.high), std::move(profile.low)};
  }

  auto low = BidDistribution::point_mass(b);
  if (format == AuctionFormat::second_price || theta <= 0.0)
  {
    return {BidDistribution::point_mass(1.0), std::move(low)};
  }
  if (theta >= 1.0)
  {
    return {BidDistribution::point_mass(over_budget), std::move(low)};
  }
  return {firstprice_high_cdf(scene), std::move(low)};
}

double sample_bid(BidDistribution const &dist, double u)
{
  if (!(u >= 0.0 && u < 1.0))
  {
    throw DomainError("uniform draw must lie in [0, 1)");
  }
  return dist.quantile(u);
}

StoreEstimates simulate_store(AuctionScene const &scene, AuctionFormat format,
                              SimConfig const &config)
{
  config.validate();
  auto const   strategies = equilibrium_strategies(scene, format);
  double const theta      = scene.theta();
  int const    n          = scene.bidders();

  auto const blocks = static_cast<std::size_t>((config.replications + kBlockSize - 1) / kBlockSize);
  struct Partial
  {
    Moments u_h, u_l, pi;
    double  surplus = 0.0;
  };
  std::vector<Partial> partials(blocks);

  run_blocks(config, [&](std::size_t index, std::int64_t count, BlockRng &rng) {
    Partial            &acc = partials[index];
    std::vector<double> bids(static_cast<std::size_t>(n));
    for (std::int64_t rep = 0; rep < count; ++rep)
    {
      for (int i = 1; i < n; ++i)
      {
        bool const rival_low = rng.uniform() < theta;
        bids[i]              = sample_bid(rival_low ? strategies.low : strategies.high, rng.uniform());
      }
      double const high_bid = sample_bid(strategies.high, rng.uniform());
      double const low_bid  = sample_bid(strategies.low, rng.uniform());
      bool const   self_low = rng.uniform() < theta;

      bids[0]         = high_bid;
      auto const as_h = run_auction(format, bids, 0.0, rng);
      bids[0]         = low_bid;
      auto const as_l = run_auction(format, bids, 0.0, rng);

      acc.u_h.add(as_h.self_payoff);
      acc.u_l.add(as_l.self_payoff);
      acc.pi.add(self_low ? as_l.revenue : as_h.revenue);
      acc.surplus = std::max({acc.surplus, as_h.surplus_gap, as_l.surplus_gap});
    }
  });

  Partial total;
  for (auto const &p : partials)
  {
    total.u_h.merge(p.u_h);
    total.u_l.merge(p.u_l);
    total.pi.merge(p.pi);
    total.surplus = std::max(total.surplus, p.surplus);
  }
  return {total.u_h.estimate("u_h"), total.u_l.estimate("u_l"), total.pi.estimate("pi"),
          total.surplus};
}

MarketEstimates simulate_market(MarketParams const &params, MechanismPosting const &posting,
                                DemandResponse const &demand, SimConfig const &config)
{
  config.validate();
  double const b       = params.budget();
  double const theta   = demand.theta();
  double const reserve = posting.reserve;

  auto const blocks = static_cast<std::size_t>((config.replications + kBlockSize - 1) / kBlockSize);
  struct Partial
  {
    Moments u_h, u_l, profit, empty;
    double  surplus = 0.0;
  };
  std::vector<Partial> partials(blocks);

  run_blocks(config, [&](std::size_t index, std::int64_t count, BlockRng &rng) {
    Partial &acc = partials[index];
    // Strategies depend on the number of bidders; built on first use.
    std::vector<std::optional<StoreStrategies>> cache;
    auto strategies_for = [&](int n) -> StoreStrategies const & {
      if (cache.size() <= static_cast<std::size_t>(n))
      {
        cache.resize(static_cast<std::size_t>(n) + 1);
      }
      auto &slot = cache[static_cast<std::size_t>(n)];
      if (!slot)
      {
        slot = equilibrium_strategies(AuctionScene(n, theta, b), posting.format);
      }
      return *slot;
    };
    auto draw_count = [&](double rate) {
      if (rate <= 0.0)
      {
        return 0;
      }
      std::poisson_distribution<int> dist(rate);
      return dist(rng.engine());
    };

    std::vector<double> bids;
    for (std::int64_t rep = 0; rep < count; ++rep)
    {
      // Seller's view: every arriving customer.
      int const highs = draw_count(demand.x_h());
      int const lows  = draw_count(demand.x_l());
      int const total = highs + lows;
      double    revenue = 0.0;
      if (total == 1)
      {
        revenue = reserve;
      }
      else if (total >= 2)
      {
        auto const &s = strategies_for(total);
        bids.assign(static_cast<std::size_t>(total), 0.0);
        for (int i = 0; i < total; ++i)
        {
          bids[i] = sample_bid(i < lows ? s.low : s.high, rng.uniform());
        }
        auto const outcome = run_auction(posting.format, bids, reserve, rng);
        revenue            = outcome.revenue;
        acc.surplus        = std::max(acc.surplus, outcome.surplus_gap);
      }
      acc.profit.add(revenue);
      acc.empty.add(total == 0 ? 1.0 : 0.0);

      // Buyer's view: the other customers met at the store.
      int const other_highs = draw_count(demand.x_h());
      int const other_lows  = draw_count(demand.x_l());
      int const n           = other_highs + other_lows + 1;
      if (n == 1)
      {
        acc.u_h.add(1.0 - reserve);
        acc.u_l.add(1.0 - reserve);
        continue;
      }
      auto const &s = strategies_for(n);
      bids.assign(static_cast<std::size_t>(n), 0.0);
      for (int i = 1; i < n; ++i)
      {
        bids[i] = sample_bid(i <= other_lows ? s.low : s.high, rng.uniform());
      }
      double const high_bid = sample_bid(s.high, rng.uniform());
      double const low_bid  = sample_bid(s.low, rng.uniform());
      bids[0]               = high_bid;
      auto const as_h       = run_auction(posting.format, bids, reserve, rng);
      bids[0]               = low_bid;
      auto const as_l       = run_auction(posting.format, bids, reserve, rng);
      acc.u_h.add(as_h.self_payoff);
      acc.u_l.add(as_l.self_payoff);
      acc.surplus = std::max({acc.surplus, as_h.surplus_gap, as_l.surplus_gap});
    }
  });

  Partial total;
  for (auto const &p : partials)
  {
    total.u_h.merge(p.u_h);
    total.u_l.merge(p.u_l);
    total.profit.merge(p.profit);
    total.empty.merge(p.empty);
    total.surplus = std::max(total.surplus, p.surplus);
  }
  return {total.u_h.estimate("U_h"), total.u_l.estimate("U_l"), total.profit.estimate("Pi"),
          total.empty.estimate("empty_share"), total.surplus};
}

}  // namespace allpay
