#pragma once

#include <stdexcept>
#include <string>

namespace uvturb {

/// Input outside the mathematical domain of an operation (pole, non-positive
/// argument, impossible geometry).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not reach its requested accuracy. `estimate`
/// carries the best value obtained and `achieved` the error bound reached.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double achieved)
      : std::runtime_error(what), estimate_(estimate), achieved_(achieved) {}

  double estimate() const noexcept { return estimate_; }
  double achieved() const noexcept { return achieved_; }

 private:
  double estimate_;
  double achieved_;
};

/// Two gamma-pole families of a Meijer G integrand coincide (up to an
/// integer shift). Callers should perturb the shape parameters, see
/// `build_channel`.
class PoleCollisionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A search (bisection bracket, sweep range) could not find a solution.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Too few Monte-Carlo samples for the requested statistical power.
class StatisticalPowerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uvturb
