#pragma once

#include <stdexcept>
#include <string>

namespace nmc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree (vector length vs. state count, non-square matrix).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the operation's domain: index out of range,
/// step count below the minimum, a violated numeric precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A probability object or kernel spec breaks one of its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The kernel does not satisfy a modelling assumption (mutual absolute
/// continuity with the base kernel).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Non-finite input, overflow, or an undefined ratio.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmc
