#pragma once

#include <stdexcept>
#include <string>

namespace comet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wavelength outside a Sellmeier set's validity range.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Grating equation has no real solution (|sin θ_r| ≥ 1).
class EvanescentOrderError : public Error {
 public:
  using Error::Error;
};

/// Requested point does not lie on the emission ring for that wavelength.
class OffRingError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class TooFewPointsError : public Error {
 public:
  using Error::Error;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace comet
