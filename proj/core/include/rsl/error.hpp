#pragma once

#include <stdexcept>
#include <string>

namespace rsl {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or inputs (bad family parameters, p outside [0,1], ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the region where a quantity is finite or defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedTiltError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// The chain is not positive recurrent for this (p, law of X).
class StabilityError : public Error {
 public:
  using Error::Error;
};

// Regime classification or root finding could not produce an answer.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// No root of p * E[exp(s X)] = 1 on the finiteness region.
class NoRootError : public RegimeError {
 public:
  using RegimeError::RegimeError;
};

// Not enough Monte Carlo mass to form an estimate (e.g. too few exceedances).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsl
