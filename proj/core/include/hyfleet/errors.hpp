#pragma once

#include <stdexcept>
#include <string>

namespace hyfleet {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument does not hold.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input text could not be parsed; `what()` carries line/field diagnostics.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A loaded or constructed object breaks one of its data-model invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

// Problem too large for an exact solver.
class SizeError : public Error {
 public:
  using Error::Error;
};

// A plan does not match the scenario/fleet it is executed against.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Cross-object bookkeeping mismatch (e.g. a job missing from a trace).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration rejected before any run starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyfleet
