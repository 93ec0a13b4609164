#pragma once

#include "twoscale/quadrature.hpp"
#include "twoscale/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace twoscale {

// ---------------------------------------------------------------------------
// Rotation about e1 and the associated matrices of the constant-field regimes.
// ---------------------------------------------------------------------------

/// Rotation of angle -theta about e1: rows (1,0,0), (0,c,s), (0,-s,c).
Mat3 rotation_R(double theta);

/// calR(theta) = int_0^theta R - theta P: rows (0,0,0), (0,s,1-c), (0,c-1,s).
Mat3 rotation_calR(double theta);

/// Orthogonal projection onto e1.
Mat3 projector_P();

// ---------------------------------------------------------------------------
// Derivative tensors
// ---------------------------------------------------------------------------

/// Dense tensor T[i][l1]...[lk] of a vector field's k-th derivative, all
/// extents equal to the dimension d. rank() = k + 1.
class DerivativeTensor {
 public:
  DerivativeTensor(int dim, int rank);

  /// Rank-2 tensor from a Jacobian.
  static DerivativeTensor from_matrix(const Mat& jac);
  /// Rank-3 tensor; hessians[i] is the Hessian of component i.
  static DerivativeTensor from_hessians(const std::vector<Mat>& hessians);

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return rank_; }

  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t flat(std::initializer_list<int> idx) const;

  int dim_;
  int rank_;
  std::vector<double> data_;
};

/// Component i = sum over l1..lk of T[i][l1..lk] vs[0][l1] ... vs[k-1][lk].
Vec tensor_apply(const DerivativeTensor& tensor, const std::vector<Vec>& vs);

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

using FlowMap = std::function<Vec(double t, double theta, const Vec& z)>;
using FlowJacobian = std::function<Mat(double t, double theta, const Vec& z)>;
using FlowHessian = std::function<DerivativeTensor(double t, double theta, const Vec& z)>;

/// Solution Z(t, theta; z) of dZ/dtheta = b(t, Z), Z(t, 0; z) = z, assumed
/// 2pi-periodic in theta.
struct PeriodicFlow {
  FlowMap Z;
  FlowJacobian jac_z;
  FlowMap dZ_dt;
  /// Optional; finite differences of Z are used when empty.
  FlowHessian hess_z;
  /// Z does not depend on t.
  bool time_independent = false;
  /// z -> Z(t, theta; z) is linear (b linear in x).
  bool linear = false;
};

struct TwoScaleSystem {
  std::string name;
  int dim = 0;
  /// a(t, theta, x), 2pi-periodic in theta.
  std::function<Vec(double t, double theta, const Vec& x)> a;
  /// b(t, x).
  std::function<Vec(double t, const Vec& x)> b;
  PeriodicFlow flow;
  int smoothness = 2;
  /// Optional analytic Jacobian of alpha0 with respect to y0.
  FlowJacobian alpha0_jac;
};

/// Residuals of the structural assumptions on a system, sampled at random
/// points. Each entry is the maximum relative deviation observed.
struct SystemCheck {
  double a_periodicity = 0.0;
  double flow_periodicity = 0.0;
  double flow_ode = 0.0;        // FD dZ/dtheta against b(t, Z)
  double flow_identity = 0.0;   // Z(t,0,z) = z and jac_z(t,0,z) = I
  double flow_jacobian = 0.0;   // jac_z against FD of Z
  double flow_dt = 0.0;         // dZ_dt against FD of Z in t
};

struct SampleBox {
  double t_min = 0.0, t_max = 1.0;
  double coord_min = -1.0, coord_max = 1.0;
};

/// Sampler for points where the system is evaluated; defaults to a uniform box.
using PointSampler = std::function<Vec(std::uint64_t index)>;

SystemCheck check_system(const TwoScaleSystem& sys, int samples, std::uint64_t seed,
                         const PointSampler& sampler = {});

/// Relative deviation |a - b| / max(|b|, 1).
double relative_deviation(const Vec& a, const Vec& b);

// ---------------------------------------------------------------------------
// Regime identifiers
// ---------------------------------------------------------------------------

enum class RegimeKind { irs_const, gc_const, flr_const, gc_variable };

/// Highest expansion order with closed forms for the regime.
int max_order(RegimeKind kind);
std::string_view to_string(RegimeKind kind);
std::optional<RegimeKind> parse_regime_kind(std::string_view name);

}  // namespace twoscale
