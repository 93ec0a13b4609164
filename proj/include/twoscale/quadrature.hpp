#pragma once

// Periodic quadrature on uniform grids over [0, 2pi).
//
// Period means use the periodic trapezoid rule. The oscillatory deviation
//   D[f](theta) = int_0^theta f - (theta / 2pi) int_0^{2pi} f
// is obtained from the trigonometric interpolant of the samples: the zero-mean
// part of the interpolant is integrated mode by mode, so for smooth periodic f
// both quantities converge spectrally in the number of nodes. D[f] is linear
// in the samples, which lets every consumer precompute a weight row.

#include "twoscale/types.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace twoscale {

struct QuadratureConfig {
  int base_nodes = 64;
  int max_nodes = 4096;
  double rel_tol = 1e-10;

  void validate() const;
};

class PeriodicGrid {
 public:
  explicit PeriodicGrid(int nodes);

  int size() const noexcept { return n_; }
  double node(int l) const noexcept { return kTwoPi * l / n_; }

  /// Weight row w such that D[f](theta) = sum_l w_l f(node l). theta in [0, 2pi].
  Eigen::RowVectorXd deviation_weights(double theta) const;

  /// Row j holds deviation_weights(node j).
  const Mat& deviation_matrix() const noexcept { return at_nodes_; }

 private:
  int n_;
  // c_[m] = (2/N) sum_k sin(2 pi k m / N) / k over the resolved modes.
  std::vector<double> c_;
  Mat at_nodes_;
};

/// Shared, lazily built grids. Safe to call from several threads.
const PeriodicGrid& periodic_grid(int nodes);

/// Reduce a phase to [0, 2pi).
double reduce_phase(double theta);

template <class F>
auto period_mean(F&& f, int nodes) {
  const PeriodicGrid& grid = periodic_grid(nodes);
  using Value = std::decay_t<decltype(std::declval<F&>()(0.0).eval())>;
  Value sum = f(grid.node(0)).eval();
  for (int l = 1; l < nodes; ++l) sum += f(grid.node(l));
  return Value(sum / static_cast<double>(nodes));
}

/// (int_0^theta - theta/2pi int_0^{2pi}) applied to f, for vector or matrix valued f.
template <class F>
auto osc_deviation(F&& f, double theta, int nodes) {
  if (!(theta >= 0.0 && theta <= kTwoPi)) {
    throw std::domain_error("osc_deviation: theta must lie in [0, 2pi]");
  }
  const PeriodicGrid& grid = periodic_grid(nodes);
  const Eigen::RowVectorXd w = grid.deviation_weights(theta);
  using Value = std::decay_t<decltype(std::declval<F&>()(0.0).eval())>;
  Value sum = (w(0) * f(grid.node(0))).eval();
  for (int l = 1; l < nodes; ++l) sum += w(l) * f(grid.node(l));
  return sum;
}

/// Node doubling driver: evaluates estimate(N) for N = base, 2 base, ... until
/// two successive results agree to rel_tol * (1 + |latest|). A single
/// evaluation is made when base_nodes == max_nodes.
Vec refine_nodes(const std::function<Vec(int)>& estimate, const QuadratureConfig& q,
                 const char* what);

}  // namespace twoscale
