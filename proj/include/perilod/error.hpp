#pragma once

#include <stdexcept>
#include <string>

namespace perilod {

/// Base class for all perilod errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A domain value violates its invariants (bad field, inset larger than the
/// display, non-positive velocity, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// The configuration as a whole is unusable: unreadable or malformed files,
/// or a display on which the task is impossible.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Trial generation gave up (rejection sampling exceeded its attempt budget).
class GenerationError : public Error {
  public:
    using Error::Error;
};

/// Calibration could not reach the residual threshold.
class CalibrationError : public Error {
  public:
    using Error::Error;
};

} // namespace perilod
