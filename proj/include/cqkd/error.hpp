#pragma once

#include <stdexcept>
#include <string>

namespace cqkd {

// Violated operation precondition (bad argument, wrong subsystem layout).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Subsystem label misuse: duplicate labels in a tensor product, unknown label
// in a partial trace.
class CompositionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A probability or invariant drifted past roundoff tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root finder could not bracket a sign change.
class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqkd
