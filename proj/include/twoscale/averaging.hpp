#pragma once

// Averaging recurrence for dX/dt = a(t, (t-s)/eps, X) + b(t, X)/eps.
//
// With the Van der Pol change of unknown X = Z(t, theta; Y) the slow unknown
// obeys dY/dt = alpha0(t, theta, Y). The averaged hierarchy is driven by
//
//   alpha^0      = {grad_z Z}^{-1} (a(t, theta, Z) - dZ/dt)
//   abar^k       = period mean of alpha^k
//   thetaA^k     = int_0^theta alpha^k - theta abar^k
//   alpha^1      = {grad alpha^0}{w1} - D0 thetaA^0
//   alpha^2      = {grad alpha^0}{w2} + 1/2 {grad^2 alpha^0}{w1, w1} - D1 thetaA^1
//
// with w_j = y^j + thetaA^{j-1} and D_{k} the derivative along
// (t, y^0..y^k) -> (1, abar^0..abar^k). The D terms are directional finite
// differences of the whole thetaA grid, recomputed at perturbed states.

#include "twoscale/fd.hpp"
#include "twoscale/model.hpp"
#include "twoscale/quadrature.hpp"

#include <vector>

namespace twoscale {

/// Arguments (t, y^0, ..., y^k) of the order-k averaged fields.
struct StateStack {
  double t = 0.0;
  std::vector<Vec> y;

  int order() const noexcept { return static_cast<int>(y.size()) - 1; }
  /// Lower part (y^0..y^k).
  StateStack truncated(int k) const;
  void validate(int dim) const;
};

/// How the order-k local terms are assembled.
enum class LocalRoute {
  /// Taylor coefficients of alpha0 in y0, by finite differences of alpha0
  /// (or its analytic Jacobian when the system provides one).
  recurrence,
  /// Expanded forms written with derivatives of a and Z: at order 1 the
  /// general formula, at order 2 the form valid for linear time-independent
  /// flows only.
  expanded,
};

struct AveragingOptions {
  QuadratureConfig quad;
  FDConfig fd;
  LocalRoute route = LocalRoute::recurrence;
  /// Use TwoScaleSystem::alpha0_jac when present.
  bool use_analytic_closures = true;

  void validate() const {
    quad.validate();
    fd.validate();
  }
};

inline constexpr int kMaxAveragingOrder = 2;

/// Per-node samples of alpha^j and thetaA^j, j = 0..k, on one grid.
struct CascadeGrids {
  int nodes = 0;
  std::vector<Mat> alpha;  // d x N
  std::vector<Mat> dev;    // d x N, thetaA^j at the nodes
  std::vector<Vec> mean;   // abar^j
};

Vec alpha0(const TwoScaleSystem& sys, double t, double theta, const Vec& y0);

Vec abar0(const TwoScaleSystem& sys, double t, const Vec& y0, const QuadratureConfig& q = {});

/// theta * A^k(t, theta, y^0..y^k); theta is reduced to [0, 2pi] by the caller.
Vec theta_A(const TwoScaleSystem& sys, int k, const StateStack& stack, double theta,
            const AveragingOptions& opts = {});

Vec alpha_k(const TwoScaleSystem& sys, int k, const StateStack& stack, double theta,
            const AveragingOptions& opts = {});

Vec abar_k(const TwoScaleSystem& sys, int k, const StateStack& stack,
           const AveragingOptions& opts = {});

/// abar^0..abar^k at once (k = stack.order()), stacked into one vector.
Vec abar_all(const TwoScaleSystem& sys, const StateStack& stack, const AveragingOptions& opts = {});

/// All grids up to order k on a fixed number of nodes (no refinement).
CascadeGrids cascade_grids(const TwoScaleSystem& sys, int k, const StateStack& stack, int nodes,
                           const AveragingOptions& opts = {});

/// thetaA^j(theta) for j = 0..k on a fixed grid.
std::vector<Vec> deviations_at(const CascadeGrids& grids, double theta);

}  // namespace twoscale
