#pragma once

// Oscillating profiles X^k(t, theta) from averaged states, partial sums of
// the expansion, and the transported density along approximate
// characteristics.

#include "twoscale/averaging.hpp"
#include "twoscale/integrate.hpp"
#include "twoscale/regimes.hpp"

#include <functional>

namespace twoscale {

/// Generic X^k from the flow and its derivatives:
///   X^0 = Z(y0),  X^1 = grad Z w1,  X^2 = grad Z w2 + 1/2 grad^2 Z {w1, w1}
/// with w_j = y^j + thetaA^{j-1}(theta). theta is reduced modulo 2 pi.
PhaseState reconstruct_X(const TwoScaleSystem& sys, int k, double theta, const StateStack& stack,
                         const AveragingOptions& opts = {});

/// Profiles X^0..X^k at one phase (shares the deviation computation).
std::vector<PhaseState> reconstruct_profiles(const TwoScaleSystem& sys, int k, double theta,
                                             const StateStack& stack, const AveragingOptions& opts = {});

/// sum_{i<=k} eps^i X^i(t, (t - s)/eps), t = stack.t.
PhaseState expansion_sum(const TwoScaleSystem& sys, int k, double eps, double s, const StateStack& stack,
                         const AveragingOptions& opts = {});
PhaseState expansion_sum(const RegimeSpec& regime, int k, double eps, double s, const StateStack& stack,
                         const AveragingOptions& opts = {});

/// (X_eps - sum_{i<k} eps^i X^i) / eps^k. partial_sums[j] holds the order-j
/// partial sum on the grid; only partial_sums[k - 1] is read.
Trajectory residual_extract(const Trajectory& reference, const std::vector<Trajectory>& partial_sums, int k,
                            double eps);

using Density = std::function<double(const PhaseState&)>;

/// u0 at the order-k approximation of the backward characteristic through
/// (x, t): the hierarchy is started at time t from x and run back to s, then
/// the profiles are summed at phase -(t - s)/eps.
double transported_density(const Density& u0, const RegimeSpec& regime, int k, double eps, double t, double s,
                           const PhaseState& x, const HierarchyOptions& opts = {});

}  // namespace twoscale
