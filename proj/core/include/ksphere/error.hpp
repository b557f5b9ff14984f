#pragma once

#include <stdexcept>
#include <string>

namespace ksphere {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input rejected before any computation (bad dimensions, non-Hermitian
/// matrices, malformed files, out-of-range parameters).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (eigensolver, integrator, truncation search).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A hard invariant of the dynamics did not hold on computed data.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class StepUnderflowError : public NumericalError {
 public:
  StepUnderflowError(const std::string& what, double last_good_time)
      : NumericalError(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, int levels, double tail_mass)
      : NumericalError(what), levels_(levels), tail_mass_(tail_mass) {}
  int levels() const noexcept { return levels_; }
  double tail_mass() const noexcept { return tail_mass_; }

 private:
  int levels_;
  double tail_mass_;
};

}  // namespace ksphere
