#pragma once

#include <stdexcept>
#include <string>

namespace allpay {

// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Operation requires a scene in a particular equilibrium region.
class RegionError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

// theta in {0, 1}: the two-type construction does not apply and the
// caller should fall back to a single-type profile.
class DegenerateComposition : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Parameters outside the hypothesis under which a market result is claimed.
class HypothesisViolated : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Series hit its term cap before the tail bound dropped below tolerance.
class TruncationError : public std::runtime_error
{
public:
  TruncationError(const std::string &what, double residual_bound)
    : std::runtime_error(what)
    , residual_bound_(residual_bound)
  {}

  double residual_bound() const noexcept
  {
    return residual_bound_;
  }

private:
  double residual_bound_;
};

}  // namespace allpay
