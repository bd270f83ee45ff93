#pragma once

#include <stdexcept>
#include <string>

namespace gamma_lab {

/// Operands live in different ambient dimensions, or a variable index is out of range.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition on parameters or inputs does not hold
/// (e.g. Gamma shape r < 1, a degenerate functional, an empty grid).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The limit law of a sequence is degenerate (zero variance), so the
/// functional has no density and the total-variation machinery does not apply.
class DegenerateLimitError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A configuration file or command line is malformed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two routes to the same quantity disagree. Signals a convention bug
/// (generator drift vs. reference measure), never bad user input.
class ConventionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A verification step of an experiment failed (e.g. an empirical distance
/// exceeding its evaluated bound beyond statistical slack).
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gamma_lab
