#pragma once

#include <stdexcept>
#include <string>

namespace dynpath {

// Base of every error raised by the library. Each subclass corresponds to one
// failure class that the command-line tool maps onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a type invariant (bad probability, malformed pmf, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Both transition probabilities are zero.
class NoStationaryDistribution : public Error {
 public:
  using Error::Error;
};

// A denominator vanished to within 1e-300.
class NumericalSingularity : public Error {
 public:
  using Error::Error;
};

// The traversal time is not almost surely finite.
class InfiniteExpectation : public Error {
 public:
  using Error::Error;
};

// Requested work exceeds a configured budget (state space, series length).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class SimulationTimeout : public Error {
 public:
  using Error::Error;
};

}  // namespace dynpath
