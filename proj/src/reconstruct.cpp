#include "twoscale/reconstruct.hpp"

#include <cmath>

namespace twoscale {

namespace {

void check_reconstruct_order(const TwoScaleSystem& sys, int k, const StateStack& stack) {
  if (k < 0 || k > kMaxAveragingOrder) {
    throw Error("reconstruct: order " + std::to_string(k) + " is not supported (max 2)");
  }
  stack.validate(sys.dim);
  if (stack.order() < k) throw DimensionError("reconstruct: stack order below requested order");
}

Vec second_flow_term(const TwoScaleSystem& sys, double t, double theta, const Vec& y0, const Vec& w,
                     const AveragingOptions& opts) {
  const auto& flow = sys.flow;
  if (flow.hess_z) return tensor_apply(flow.hess_z(t, theta, y0), {w, w});
  if (flow.linear) return Vec::Zero(sys.dim);
  return directional_second([&](const Vec& z) { return flow.Z(t, theta, z); }, y0, w, opts.fd.h2,
                            flow.Z(t, theta, y0));
}

}  // namespace

std::vector<PhaseState> reconstruct_profiles(const TwoScaleSystem& sys, int k, double theta,
                                             const StateStack& stack, const AveragingOptions& opts) {
  check_reconstruct_order(sys, k, stack);
  opts.validate();
  const double th = reduce_phase(theta);
  const double t = stack.t;
  const Vec& y0 = stack.y[0];
  std::vector<PhaseState> out{sys.flow.Z(t, th, y0)};
  if (k == 0) return out;

  const int d = sys.dim;
  const Vec devs = refine_nodes(
      [&](int n) {
        const std::vector<Vec> parts = deviations_at(cascade_grids(sys, k - 1, stack, n, opts), th);
        Vec all(d * k);
        for (int j = 0; j < k; ++j) all.segment(j * d, d) = parts[j];
        return all;
      },
      opts.quad, "reconstruct");
  const Mat jac = sys.flow.jac_z(t, th, y0);
  const Vec w1 = stack.y[1] + devs.head(d);
  out.push_back(jac * w1);
  if (k == 2) {
    const Vec w2 = stack.y[2] + devs.segment(d, d);
    out.push_back(jac * w2 + 0.5 * second_flow_term(sys, t, th, y0, w1, opts));
  }
  return out;
}

PhaseState reconstruct_X(const TwoScaleSystem& sys, int k, double theta, const StateStack& stack,
                         const AveragingOptions& opts) {
  return reconstruct_profiles(sys, k, theta, stack, opts).back();
}

PhaseState expansion_sum(const TwoScaleSystem& sys, int k, double eps, double s, const StateStack& stack,
                         const AveragingOptions& opts) {
  if (!(eps > 0.0)) throw ConfigError("expansion_sum: eps must be positive");
  const auto profiles = reconstruct_profiles(sys, k, (stack.t - s) / eps, stack, opts);
  PhaseState sum = profiles[0];
  double scale = 1.0;
  for (int i = 1; i <= k; ++i) {
    scale *= eps;
    sum += scale * profiles[i];
  }
  return sum;
}

PhaseState expansion_sum(const RegimeSpec& regime, int k, double eps, double s, const StateStack& stack,
                         const AveragingOptions& opts) {
  if (!(eps > 0.0)) throw ConfigError("expansion_sum: eps must be positive");
  const double theta = (stack.t - s) / eps;
  PhaseState sum = regime_reconstruct(regime, 0, theta, stack, opts);
  double scale = 1.0;
  for (int i = 1; i <= k; ++i) {
    scale *= eps;
    sum += scale * regime_reconstruct(regime, i, theta, stack, opts);
  }
  return sum;
}

Trajectory residual_extract(const Trajectory& reference, const std::vector<Trajectory>& partial_sums, int k,
                            double eps) {
  if (eps == 0.0) throw ConfigError("residual_extract: eps must be nonzero");
  if (k == 0) return reference;
  if (static_cast<int>(partial_sums.size()) < k) {
    throw DimensionError("residual_extract: missing partial sum of order " + std::to_string(k - 1));
  }
  const Trajectory& lower = partial_sums[k - 1];
  if (lower.size() != reference.size()) throw DimensionError("residual_extract: grids differ");
  const double scale = std::pow(eps, k);
  Trajectory out;
  out.reserve(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) out.push_back((reference[i] - lower[i]) / scale);
  return out;
}

double transported_density(const Density& u0, const RegimeSpec& regime, int k, double eps, double t, double s,
                           const PhaseState& x, const HierarchyOptions& opts) {
  if (!(eps > 0.0)) throw ConfigError("transported_density: eps must be positive");
  if (x.size() != 6) throw DimensionError("transported_density: state must have length 6");
  if (t == s) return u0(x);
  const RateFn rate = hierarchy_rate(regime, k, opts);
  Vec start = Vec::Zero(6 * (k + 1));
  start.head(6) = x;
  const long steps = std::max(opts.min_steps, 1);
  const double dt = (s - t) / static_cast<double>(steps);
  const Vec end = rk4_advance(rate, start, t, dt, steps);
  StateStack st{s, {}};
  for (int j = 0; j <= k; ++j) st.y.push_back(end.segment(6 * j, 6));
  // Profiles of the expansion started at time t, evaluated at time s.
  return u0(expansion_sum(regime, k, eps, t, st, opts.averaging));
}

}  // namespace twoscale
