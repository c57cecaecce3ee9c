#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ttofs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Base class of all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (|λ| ≥ 1, empty set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A grid or Fourier window could not be refined far enough.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Operation requested in a mode its input does not support.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace ttofs
