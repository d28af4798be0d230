#pragma once

#include <stdexcept>
#include <string>

namespace swexp {

/// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NegativeProbabilityError : public Error {
 public:
  using Error::Error;
};

class ZeroMassError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class DeltaOutOfRangeError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Metric assigns zero weight to a pair the source can emit.
class IncompatibleMetricError : public Error {
 public:
  using Error::Error;
};

class BlocklengthTooLargeError : public Error {
 public:
  using Error::Error;
};

class EnumerationTooLargeError : public Error {
 public:
  using Error::Error;
};

class NotConvergedError : public Error {
 public:
  using Error::Error;
};

/// An expurgation round repeatedly failed to retain half of its population.
class IterationBudgetExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace swexp
