#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace twoscale {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Point of the phase space R^d. For the charged-particle regimes d = 6 and
/// the layout is (position, velocity).
using PhaseState = Vec;

/// Sampled trajectory: one state per grid point.
using Trajectory = std::vector<Vec>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr const char* kVersion = "1.0.0";

// Errors. The CLI maps each family onto its own exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Evaluation too close to the symmetry axis of the variable field.
class AxisError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Integration produced a non-finite state.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double time) : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace twoscale
