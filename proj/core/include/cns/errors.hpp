#pragma once

#include <stdexcept>
#include <string>

namespace cns {

/// Malformed domain: empty or disconnected mask, too few cells.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time step exceeds the explicit transport limit of a stepper.
class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear or eigen solver failed to factor or converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scheme invariant (positivity, maximum principle, mass, divergence) was
/// violated during a checked run.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cns
