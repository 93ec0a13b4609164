#pragma once

// The charged-particle regimes in (x, v) in R^3 x R^3 with strong field
// direction M. Closed-form averaged systems and reconstructions, plus the
// TwoScaleSystem each regime defines for the generic engine.

#include "twoscale/averaging.hpp"
#include "twoscale/fields.hpp"
#include "twoscale/model.hpp"

namespace twoscale {

/// Geometry of the variable strong field M(x) = (-x2, x1, 0) / Omega,
/// Omega = sqrt(x1^2 + x2^2).
struct VariableFieldGeometry {
  double r_min = 1e-6;

  /// Throws AxisError when Omega(x) < r_min.
  double omega(const Vec3& x) const;
  Vec3 direction(const Vec3& x) const;
  /// d direction / d x_j in column j.
  Mat3 direction_jacobian(const Vec3& x) const;
  /// The gyration matrix A(theta, z) mapping w to the rotated velocity.
  Mat3 gyration(double theta, const Vec3& z) const;
  /// d(A(theta, z) w)/dz.
  Mat3 gyration_jacobian(double theta, const Vec3& z, const Vec3& w) const;
  /// Period mean of A: M M^T.
  Mat3 mean_gyration(const Vec3& y) const;
  /// The printed mean of -A^T grad_z(A w)(A w).
  Vec3 mean_drift(const Vec3& y, const Vec3& u) const;
};

struct RegimeSpec {
  RegimeKind kind = RegimeKind::gc_const;
  ElectricField field;
  VariableFieldGeometry geometry;

  int max_order() const { return twoscale::max_order(kind); }
  /// Rejects fields the regime cannot take.
  void validate() const;
};

TwoScaleSystem make_system(const RegimeSpec& regime);

/// Stacked closed-form averaged fields (abar^0, ..., abar^k) at stack.t.
/// gc_variable has closed forms at order 0 only.
Vec regime_rhs(const RegimeSpec& regime, int k, const StateStack& stack,
               const QuadratureConfig& q = {});

/// The printed profile X^k(t, theta) built from the stack. For gc_variable at
/// order 1 the position is the printed formula and the velocity comes from
/// the generic reconstruction.
PhaseState regime_reconstruct(const RegimeSpec& regime, int k, double theta,
                              const StateStack& stack, const AveragingOptions& opts = {});

/// Position block of dY^1/dt for gc_variable, as printed; e is E(t, y0).
Vec3 variable_Y1_position_rhs(const Vec3& y0, const Vec3& u0, const Vec3& y1, const Vec3& u1,
                              const Vec3& e, const VariableFieldGeometry& geom = {});

/// Position and velocity halves of a regime state.
inline Vec3 pos(const Vec& s) { return s.head<3>(); }
inline Vec3 vel(const Vec& s) { return s.tail<3>(); }
Vec join(const Vec3& x, const Vec3& v);

}  // namespace twoscale
