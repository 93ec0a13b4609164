#pragma once

// Prescribed electric fields E(t, theta, x) for the charged-particle regimes,
// with the derivatives the closed forms need.

#include "twoscale/types.hpp"

#include <array>
#include <functional>

namespace twoscale {

struct ElectricField {
  using ValueFn = std::function<Vec3(double t, double theta, const Vec3& x)>;
  using MatrixFn = std::function<Mat3(double t, double theta, const Vec3& x)>;
  using HessianFn = std::function<std::array<Mat3, 3>(double t, double theta, const Vec3& x)>;

  ValueFn value;
  /// J(i, j) = dE_i / dx_j
  MatrixFn jacobian;
  ValueFn dt;
  /// hessian[i] is the Hessian of E_i in x.
  HessianFn hessian;
  /// d/dt of the Jacobian.
  MatrixFn dt_jacobian;
  ValueFn dtt;
  bool theta_dependent = false;

  Vec3 operator()(double t, double theta, const Vec3& x) const { return value(t, theta, x); }

  /// {grad^2 E}{u, v}
  Vec3 second(double t, double theta, const Vec3& x, const Vec3& u, const Vec3& v) const;
};

ElectricField constant_field(const Vec3& e);

/// A (sin(k x2 + w t + n theta), cos(k x3 + w t + n theta), sin(k x1 + w t + n theta)).
ElectricField trig_field(double amplitude, double wavenumber, double omega, int harmonic);

/// (0, A sin(k x1 + w t), 0).
ElectricField transverse_sin_field(double amplitude, double wavenumber, double omega);

/// c cos(theta + phase) (1 + m sin(x3 + w t)); resonant with the gyration.
ElectricField resonant_field(const Vec3& direction, double modulation, double omega, double phase);

/// Wraps an arbitrary field; derivatives by finite differences.
ElectricField field_from_function(ElectricField::ValueFn fn, bool theta_dependent);

}  // namespace twoscale
