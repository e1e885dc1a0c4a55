#include "allpay/bid_distribution.hpp"

#include "allpay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace allpay {
namespace {

constexpr double kMassTolerance = 1e-12;

// Antiderivative of (slope * p + shift)^power.
double power_antiderivative(PowerSegment const &s, double p)
{
  double const base = s.slope * p + s.shift;
  if (s.power == -1.0)
  {
    return std::log(base) / s.slope;
  }
  return std::pow(base, s.power + 1.0) / (s.slope * (s.power + 1.0));
}

}  // namespace

double PowerSegment::cdf(double p) const
{
  double const base = std::max(slope * p + shift, 0.0);
  return offset + scale * std::pow(base, power);
}

double PowerSegment::inverse(double g) const
{
  double const ratio = (g - offset) / scale;
  double const base  = std::pow(std::max(ratio, 0.0), 1.0 / power);
  return (base - shift) / slope;
}

double PowerSegment::integral(double a, double b) const
{
  return offset * (b - a) + scale * (power_antiderivative(*this, b) - power_antiderivative(*this, a));
}

BidDistribution::BidDistribution(std::vector<PowerSegment> segments, std::vector<Atom> atoms)
  : segments_(std::move(segments))
  , atoms_(std::move(atoms))
{
  std::sort(segments_.begin(), segments_.end(),
            [](auto const &a, auto const &b) { return a.lower < b.lower; });
  std::sort(atoms_.begin(), atoms_.end(),
            [](auto const &a, auto const &b) { return a.location < b.location; });

  double total = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i)
  {
    auto const &s = segments_[i];
    if (!(s.lower <= s.upper) || !std::isfinite(s.lower) || !std::isfinite(s.upper))
    {
      throw DomainError("segment bounds must be finite and ordered");
    }
    if (i > 0 && segments_[i - 1].upper > s.lower)
    {
      throw DomainError("segments overlap");
    }
    double const lo  = s.cdf(s.lower);
    double const mid = s.cdf(0.5 * (s.lower + s.upper));
    double const hi  = s.cdf(s.upper);
    if (!(lo <= mid + kMassTolerance && mid <= hi + kMassTolerance))
    {
      throw DomainError("segment cdf is not nondecreasing");
    }
    total += hi - lo;
  }
  for (auto const &a : atoms_)
  {
    if (!(a.mass > 0.0 && a.mass <= 1.0 + kMassTolerance) || !std::isfinite(a.location))
    {
      throw DomainError("atom mass must lie in (0, 1]");
    }
    for (auto const &s : segments_)
    {
      if (a.location > s.lower && a.location < s.upper)
      {
        throw DomainError("atom at " + std::to_string(a.location) + " is interior to a segment");
      }
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
  {
    throw DomainError("bid distribution mass is " + std::to_string(total) + ", expected 1");
  }

  for (std::size_t i = 0; i < segments_.size(); ++i)
  {
    pieces_.push_back({false, static_cast<int>(i), segments_[i].mass(), 0.0});
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i)
  {
    pieces_.push_back({true, static_cast<int>(i), atoms_[i].mass, 0.0});
  }
  // An atom sorts before a segment starting at the same location.
  auto key = [this](Piece const &p) {
    double const loc = p.is_atom ? atoms_[p.index].location : segments_[p.index].lower;
    return std::pair{loc, p.is_atom ? 0 : 1};
  };
  std::sort(pieces_.begin(), pieces_.end(),
            [&](Piece const &a, Piece const &b) { return key(a) < key(b); });
  double cumulative = 0.0;
  for (auto &p : pieces_)
  {
    p.cumulative_before = cumulative;
    cumulative += p.mass;
  }
}

BidDistribution BidDistribution::point_mass(double location)
{
  return BidDistribution({}, {Atom{location, 1.0}});
}

double BidDistribution::continuous_below(double p) const
{
  double sum = 0.0;
  for (auto const &s : segments_)
  {
    if (p <= s.lower)
    {
      break;
    }
    double const x = std::min(p, s.upper);
    sum += s.cdf(x) - s.cdf(s.lower);
  }
  return sum;
}

double BidDistribution::eval(double p) const
{
  double sum = continuous_below(p);
  for (auto const &a : atoms_)
  {
    if (a.location <= p)
    {
      sum += a.mass;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

double BidDistribution::eval_left(double p) const
{
  double sum = continuous_below(p);
  for (auto const &a : atoms_)
  {
    if (a.location < p)
    {
      sum += a.mass;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

double BidDistribution::atom_mass_at(double p) const
{
  double mass = 0.0;
  for (auto const &a : atoms_)
  {
    if (a.location == p)
    {
      mass += a.mass;
    }
  }
  return mass;
}

double BidDistribution::quantile(double u) const
{
  if (!(u >= 0.0 && u < 1.0))
  {
    throw DomainError("quantile level must lie in [0, 1), got " + std::to_string(u));
  }
  for (auto const &piece : pieces_)
  {
    if (piece.mass <= 0.0 || u >= piece.cumulative_before + piece.mass)
    {
      continue;
    }
    if (piece.is_atom)
    {
      return atoms_[piece.index].location;
    }
    auto const  &s      = segments_[piece.index];
    double const target = s.cdf(s.lower) + (u - piece.cumulative_before);
    return std::clamp(s.inverse(target), s.lower, s.upper);
  }
  // u within rounding of 1
  return upper_support();
}

double BidDistribution::mean() const
{
  double m = 0.0;
  for (auto const &a : atoms_)
  {
    m += a.location * a.mass;
  }
  // Integration by parts on each segment: int p dF = [p F] - int F dp.
  for (auto const &s : segments_)
  {
    if (s.upper == s.lower)
    {
      continue;
    }
    m += s.upper * s.cdf(s.upper) - s.lower * s.cdf(s.lower) - s.integral(s.lower, s.upper);
  }
  return m;
}

double BidDistribution::lower_support() const
{
  double lo = std::numeric_limits<double>::infinity();
  for (auto const &p : pieces_)
  {
    if (p.mass > 0.0)
    {
      lo = p.is_atom ? atoms_[p.index].location : segments_[p.index].lower;
      break;
    }
  }
  return lo;
}

double BidDistribution::upper_support() const
{
  double hi = -std::numeric_limits<double>::infinity();
  for (auto const &p : pieces_)
  {
    if (p.mass > 0.0)
    {
      hi = std::max(hi, p.is_atom ? atoms_[p.index].location : segments_[p.index].upper);
    }
  }
  return hi;
}

BidDistribution BidDistribution::shifted(double delta) const
{
  std::vector<PowerSegment> segments = segments_;
  for (auto &s : segments)
  {
    s.lower += delta;
    s.upper += delta;
    s.shift -= s.slope * delta;
  }
  std::vector<Atom> atoms = atoms_;
  for (auto &a : atoms)
  {
    a.location += delta;
  }
  return {std::move(segments), std::move(atoms)};
}

}  // namespace allpay
