#include "twoscale/integrate.hpp"

#include <cmath>
#include <sstream>

namespace twoscale {

void TimeGrid::validate() const {
  if (!std::isfinite(s)) throw ConfigError("time grid: s must be finite");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("time grid: T must be positive");
  if (samples < 2) throw ConfigError("time grid: at least 2 samples required");
}

namespace {

void check_finite(const Vec& x, double t) {
  if (!x.allFinite()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integration produced a non-finite state at t = " << t;
    throw BlowUpError(msg.str(), t);
  }
}

}  // namespace

Vec rk4_advance(const RateFn& f, Vec x, double t0, double dt, long steps) {
  for (long n = 0; n < steps; ++n) {
    const double t = t0 + dt * static_cast<double>(n);
    const Vec k1 = f(t, x);
    const Vec k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Vec k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Vec k4 = f(t + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(x, t + dt);
  }
  return x;
}

Trajectory rk4_integrate(const RateFn& f, const Vec& x0, const TimeGrid& grid, int substeps_per_sample) {
  grid.validate();
  if (substeps_per_sample < 1) throw ConfigError("rk4: substeps must be >= 1");
  check_finite(x0, grid.s);
  Trajectory out;
  out.reserve(grid.samples);
  out.push_back(x0);
  const double dt = grid.spacing() / substeps_per_sample;
  Vec x = x0;
  for (int i = 1; i < grid.samples; ++i) {
    x = rk4_advance(f, std::move(x), grid.time(i - 1), dt, substeps_per_sample);
    out.push_back(x);
  }
  return out;
}

Trajectory solve_reference(const TwoScaleSystem& sys, double eps, const Vec& x0, const TimeGrid& grid,
                           int osc_resolution, int refine) {
  if (!(eps > 0.0)) throw ConfigError("reference: eps must be positive");
  if (osc_resolution < 1) throw ConfigError("reference: osc_resolution must be >= 1");
  if (refine < 1) throw ConfigError("reference: refine must be >= 1");
  grid.validate();
  if (x0.size() != sys.dim) throw DimensionError("reference: x0 length does not match system");
  const double target = std::min(grid.T / 1000.0, kTwoPi * eps / osc_resolution);
  const int substeps = static_cast<int>(std::ceil(grid.spacing() / target - 1e-9));
  const double s = grid.s;
  const RateFn f = [&sys, eps, s](double t, const Vec& x) -> Vec {
    return sys.a(t, (t - s) / eps, x) + sys.b(t, x) / eps;
  };
  return rk4_integrate(f, x0, grid, std::max(substeps, 1) * refine);
}

StateStack AveragedHierarchy::stack_at(int i) const {
  StateStack st;
  st.t = grid.time(i);
  for (const Trajectory& y : Y) st.y.push_back(y.at(i));
  return st;
}

namespace {

StateStack unstack(double t, const Vec& x, int k, int d) {
  StateStack st{t, {}};
  for (int j = 0; j <= k; ++j) st.y.push_back(x.segment(j * d, d));
  return st;
}

AveragedHierarchy integrate_cascade(const RateFn& rate, int k, int d, const Vec& x0, const TimeGrid& grid,
                                    int min_steps) {
  grid.validate();
  if (x0.size() != d) throw DimensionError("hierarchy: x0 length does not match system");
  Vec start = Vec::Zero((k + 1) * d);
  start.head(d) = x0;
  const int substeps = std::max(1, static_cast<int>(std::ceil(static_cast<double>(min_steps) / (grid.samples - 1))));
  const Trajectory joint = rk4_integrate(rate, start, grid, substeps);
  AveragedHierarchy h;
  h.order = k;
  h.grid = grid;
  h.Y.assign(k + 1, Trajectory{});
  for (const Vec& x : joint) {
    for (int j = 0; j <= k; ++j) h.Y[j].push_back(x.segment(j * d, d));
  }
  return h;
}

}  // namespace

RateFn hierarchy_rate(const TwoScaleSystem& sys, int k, const AveragingOptions& opts) {
  if (k < 0 || k > kMaxAveragingOrder) {
    throw Error("hierarchy: order " + std::to_string(k) + " is not supported by the generic engine");
  }
  return [sys, k, opts](double t, const Vec& x) { return abar_all(sys, unstack(t, x, k, sys.dim), opts); };
}

RateFn hierarchy_rate(const RegimeSpec& regime, int k, const HierarchyOptions& opts) {
  if (k < 0 || k > regime.max_order()) {
    throw Error("regime " + std::string(to_string(regime.kind)) + ": order " + std::to_string(k) +
                " exceeds max_order " + std::to_string(regime.max_order()));
  }
  // gc_variable has no closed-form averaged system beyond order 0.
  const bool generic = opts.engine == HierarchyEngine::generic ||
                       (regime.kind == RegimeKind::gc_variable && k > 0);
  if (generic) return hierarchy_rate(make_system(regime), k, opts.averaging);
  regime.validate();
  const QuadratureConfig q = opts.averaging.quad;
  return [regime, k, q](double t, const Vec& x) { return regime_rhs(regime, k, unstack(t, x, k, 6), q); };
}

AveragedHierarchy solve_hierarchy(const TwoScaleSystem& sys, int k, const Vec& x0, const TimeGrid& grid,
                                  const HierarchyOptions& opts) {
  return integrate_cascade(hierarchy_rate(sys, k, opts.averaging), k, sys.dim, x0, grid, opts.min_steps);
}

AveragedHierarchy solve_hierarchy(const RegimeSpec& regime, int k, const Vec& x0, const TimeGrid& grid,
                                  const HierarchyOptions& opts) {
  return integrate_cascade(hierarchy_rate(regime, k, opts), k, 6, x0, grid, opts.min_steps);
}

}  // namespace twoscale
