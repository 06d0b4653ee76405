#pragma once

#include <stdexcept>
#include <string>

namespace ordcap {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative s, alpha outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested recursion level is not covered by the allocation or exceeds the chain limit.
class LevelError : public Error {
 public:
  using Error::Error;
};

// A prefix of the allocation exhausts (or exceeds) the total capacity.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Degenerate denominators, non-bracketing roots, non-convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Input violates a structural invariant (e.g. non-monotone blocking list).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Not enough events were observed to form a statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace ordcap
