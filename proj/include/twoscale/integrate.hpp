#pragma once

// Fixed-step RK4 integration of the stiff reference problem and of the
// eps-free averaged hierarchy.

#include "twoscale/averaging.hpp"
#include "twoscale/regimes.hpp"

#include <functional>
#include <map>

namespace twoscale {

struct TimeGrid {
  double s = 0.0;
  double T = 1.0;
  int samples = 400;

  void validate() const;
  double time(int i) const { return s + T * i / (samples - 1); }
  double spacing() const { return T / (samples - 1); }
};

using RateFn = std::function<Vec(double t, const Vec& x)>;

/// RK4 with substeps_per_sample uniform steps between grid points.
Trajectory rk4_integrate(const RateFn& f, const Vec& x0, const TimeGrid& grid, int substeps_per_sample);

/// Advance x from t0 by `steps` steps of size dt (dt may be negative).
Vec rk4_advance(const RateFn& f, Vec x, double t0, double dt, long steps);

/// dX/dt = a(t, (t-s)/eps, X) + b(t, X)/eps with step min(T/1000, 2 pi eps / osc_resolution),
/// divided by `refine` (used for Richardson estimates of the reference error).
Trajectory solve_reference(const TwoScaleSystem& sys, double eps, const Vec& x0, const TimeGrid& grid,
                           int osc_resolution = 50, int refine = 1);

/// Where the averaged right-hand sides come from.
enum class HierarchyEngine { closed_form, generic };

struct HierarchyOptions {
  AveragingOptions averaging;
  HierarchyEngine engine = HierarchyEngine::closed_form;
  /// Minimum number of steps over the horizon.
  int min_steps = 2000;
};

struct AveragedHierarchy {
  int order = 0;
  TimeGrid grid;
  /// Y[j][i] is Y^j at grid time i.
  std::vector<Trajectory> Y;

  StateStack stack_at(int i) const;
};

/// Stacked right-hand side (abar^0..abar^k) of the cascade, as a function of
/// (t, [y^0; ...; y^k]).
RateFn hierarchy_rate(const TwoScaleSystem& sys, int k, const AveragingOptions& opts);
RateFn hierarchy_rate(const RegimeSpec& regime, int k, const HierarchyOptions& opts);

AveragedHierarchy solve_hierarchy(const TwoScaleSystem& sys, int k, const Vec& x0, const TimeGrid& grid,
                                  const HierarchyOptions& opts = {});
AveragedHierarchy solve_hierarchy(const RegimeSpec& regime, int k, const Vec& x0, const TimeGrid& grid,
                                  const HierarchyOptions& opts = {});

/// Reference solution and partial sums of the expansion on one grid.
struct TrajectoryBundle {
  TimeGrid grid;
  double eps = 0.0;
  Trajectory reference;
  /// order k -> sum_{i<=k} eps^i X^i at the grid times.
  std::map<int, Trajectory> reconstruction;
};

}  // namespace twoscale
