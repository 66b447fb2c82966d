#pragma once

#include <stdexcept>
#include <string>

namespace systolic {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
struct DomainError : Error {
  using Error::Error;
};

// An arithmetic operation is undefined for its operands (division by zero,
// square root of a negative quantity, overflow of a fixed-width fast path).
struct ArithmeticError : Error {
  using Error::Error;
};

// An internal consistency check failed: a quantity that is provably forced by
// the construction came out wrong.  Seeing this means a bug, not bad input.
struct InvariantError : Error {
  using Error::Error;
};

// Failure inside a multi-stage computation; carries the stage name.
struct StageError : Error {
  std::string stage;
  StageError(std::string stage_name, const std::string& what_arg)
      : Error("[" + stage_name + "] " + what_arg), stage(std::move(stage_name)) {}
};

}  // namespace systolic
