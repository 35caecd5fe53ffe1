// Exception types thrown by the guidance library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gvf {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed expression text, inconsistent scenario config,
// out-of-range parameters. Maps to CLI exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

// Expression-text syntax error; `position` is a 0-based byte offset into the source.
struct ParseError : ValidationError {
  ParseError(const std::string& what, std::size_t position)
      : ValidationError(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// Numeric failure while evaluating an expression (log of a nonpositive value,
// division by zero, ...); `position` locates the offending operator.
struct EvalError : Error {
  EvalError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"), position(position) {}
  std::size_t position;
};

// Runtime guidance failures. Map to CLI exit code 2.
struct GuidanceError : Error {
  using Error::Error;
};

// Level-set field vanished (gradient zero or exact balance of terms).
struct SingularFieldError : GuidanceError {
  using GuidanceError::GuidanceError;
};

// Ground speed too low to steer by course commands.
struct StallSpeedError : GuidanceError {
  using GuidanceError::GuidanceError;
};

// Horizontal component of the parametric field vanished; no course is defined.
struct DegenerateHorizontalError : GuidanceError {
  using GuidanceError::GuidanceError;
};

// Ground velocity is numerically zero; course is undefined.
struct ZeroGroundSpeedError : GuidanceError {
  using GuidanceError::GuidanceError;
};

}  // namespace gvf
