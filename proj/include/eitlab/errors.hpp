#pragma once

#include <stdexcept>
#include <string>

namespace eitlab {

// Base of every error raised by the library. Each subclass names one failure
// mode so callers can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The trace-constrained Liouvillian system has no unique solution.
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double condition_estimate)
      : Error(what), condition_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

// A steady state violated positivity beyond tolerance.
class NonPhysical : public Error {
 public:
  using Error::Error;
};

// Dark-state mixing angle undefined (both drive strengths zero).
class DegenerateAngle : public Error {
 public:
  using Error::Error;
};

// Spectrum carries no feature usable for fit initialization.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

// Fit results compared by AIC were computed on different residual vectors.
class MismatchedData : public Error {
 public:
  using Error::Error;
};

class ZeroDelay : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MissingFit : public Error {
 public:
  using Error::Error;
};

}  // namespace eitlab
