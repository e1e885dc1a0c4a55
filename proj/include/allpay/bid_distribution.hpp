#pragma once

#include <span>
#include <vector>

namespace allpay {

// Continuous CDF piece  offset + scale * (slope * p + shift)^power  on
// [lower, upper]. Every equilibrium bid CDF in this library is of this form,
// which gives closed-form inverses and integrals.
struct PowerSegment
{
  double lower  = 0.0;
  double upper  = 0.0;
  double offset = 0.0;
  double scale  = 1.0;
  double slope  = 1.0;
  double shift  = 0.0;
  double power  = 1.0;

  double cdf(double p) const;
  double inverse(double g) const;
  // Integral of cdf over [a, b].
  double integral(double a, double b) const;

  double mass() const
  {
    return cdf(upper) - cdf(lower);
  }
};

struct Atom
{
  double location = 0.0;
  double mass     = 0.0;
};

// Mixed distribution on bids: ordered continuous power segments plus point
// masses. Immutable after construction; the constructor enforces
//   - segments ordered and non-overlapping, each nondecreasing
//   - atoms with mass in (0, 1], never interior to a segment
//   - total mass 1 within 1e-12
class BidDistribution
{
public:
  BidDistribution(std::vector<PowerSegment> segments, std::vector<Atom> atoms);

  static BidDistribution point_mass(double location);

  // P(bid <= p)
  double eval(double p) const;
  // P(bid < p)
  double eval_left(double p) const;
  double atom_mass_at(double p) const;

  // Generalized inverse: smallest p with eval(p) >= u, for u in [0, 1).
  double quantile(double u) const;

  // Mean including atom contributions, in closed form.
  double mean() const;

  double lower_support() const;
  double upper_support() const;

  // Same distribution translated by delta (cdf(p - delta)).
  BidDistribution shifted(double delta) const;

  std::span<PowerSegment const> segments() const
  {
    return segments_;
  }
  std::span<Atom const> atoms() const
  {
    return atoms_;
  }

private:
  struct Piece
  {
    bool   is_atom;
    int    index;
    double mass;
    double cumulative_before;
  };

  double continuous_below(double p) const;

  std::vector<PowerSegment> segments_;
  std::vector<Atom>         atoms_;
  std::vector<Piece>        pieces_;
};

}  // namespace allpay
