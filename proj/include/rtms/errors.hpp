#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtms {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared in a time-stepping run.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The source wave field shows multipathing where imaging needs a single arrival.
class SmeViolation : public Error {
 public:
  SmeViolation(const std::string& what, double fraction)
      : Error(what), fraction_(fraction) {}
  double fraction() const noexcept { return fraction_; }

 private:
  double fraction_;
};

/// Two inputs that must share a grid, sampling or acquisition geometry do not.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtms
