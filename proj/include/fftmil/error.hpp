#pragma once

#include <stdexcept>
#include <string>

namespace fftmil {

/// A caller handed us something that breaks an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A postcondition we promised could not be delivered (e.g. a spectrum
/// flagged as coming from a real image produced a complex inverse).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or truncated file on disk.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training or evaluation diverged (non-finite loss, gradient, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fftmil
