#pragma once

#include <stdexcept>
#include <string>

namespace sparsetrig {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A frequency does not fit on the requested grid without folding.
class AliasingError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the range an operation or rate line covers.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// An iterative solver ran out of its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double gap)
      : Error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

// The residual is numerically zero: every functional value vanishes.
class ResidualVanished : public Error {
 public:
  using Error::Error;
};

// Exhaustive search would exceed its combinatorial budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsetrig
