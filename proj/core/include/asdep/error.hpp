#pragma once

#include <stdexcept>
#include <string>

namespace asdep {

// Every failure raised by the library derives from Error so callers can
// catch the whole family, or a single category when they care which.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated: bad dimensions, out-of-range parameters,
// non-finite entries.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A numeric routine could not complete (Cholesky on a non-PD matrix,
// singular triangular factor, every Monte Carlo draw rejected).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A stencil with fewer than two nodes cannot represent a first derivative.
class DegenerateStencil : public Error {
 public:
  using Error::Error;
};

// The model carries no importance to distribute (zero Shapley budget).
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

class UnsupportedDistribution : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

// A requested closed-form reference does not exist for a test function.
class NotAvailable : public Error {
 public:
  using Error::Error;
};

}  // namespace asdep
