#include "twoscale/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace twoscale {

void QuadratureConfig::validate() const {
  const bool pow2 = base_nodes > 0 && (base_nodes & (base_nodes - 1)) == 0;
  if (base_nodes < 8 || !pow2) {
    throw ConfigError("quadrature: base_nodes must be a power of two >= 8");
  }
  if (max_nodes < base_nodes) throw ConfigError("quadrature: max_nodes must be >= base_nodes");
  if (!(rel_tol > 0.0)) throw ConfigError("quadrature: rel_tol must be positive");
}

PeriodicGrid::PeriodicGrid(int nodes) : n_(nodes), c_(nodes, 0.0), at_nodes_(nodes, nodes) {
  if (nodes < 8) throw std::invalid_argument("PeriodicGrid: at least 8 nodes required");
  // The Nyquist mode has no well-defined antiderivative on the grid; drop it.
  const int modes = (n_ - 1) / 2;
  for (int m = 0; m < n_; ++m) {
    double acc = 0.0;
    for (int k = 1; k <= modes; ++k) {
      acc += std::sin(kTwoPi * static_cast<double>((static_cast<long>(k) * m) % n_) / n_) / k;
    }
    c_[m] = 2.0 * acc / n_;
  }
  for (int j = 0; j < n_; ++j) {
    for (int l = 0; l < n_; ++l) {
      at_nodes_(j, l) = c_[((j - l) % n_ + n_) % n_] + c_[l];
    }
  }
}

Eigen::RowVectorXd PeriodicGrid::deviation_weights(double theta) const {
  // w_l = (2/N) sum_k [sin(k (theta - theta_l)) + sin(k theta_l)] / k
  const int modes = (n_ - 1) / 2;
  Eigen::RowVectorXd w(n_);
  for (int l = 0; l < n_; ++l) {
    const double phi = theta - node(l);
    // sin(k phi) by the angle-addition recurrence
    const double s1 = std::sin(phi);
    const double c1 = std::cos(phi);
    double s = s1;
    double c = c1;
    double acc = 0.0;
    for (int k = 1; k <= modes; ++k) {
      acc += s / k;
      const double sn = s * c1 + c * s1;
      c = c * c1 - s * s1;
      s = sn;
    }
    w(l) = 2.0 * acc / n_ + c_[l];
  }
  return w;
}

const PeriodicGrid& periodic_grid(int nodes) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PeriodicGrid>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[nodes];
  if (!slot) slot = std::make_unique<PeriodicGrid>(nodes);
  return *slot;
}

double reduce_phase(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Vec refine_nodes(const std::function<Vec(int)>& estimate, const QuadratureConfig& q,
                 const char* what) {
  int n = q.base_nodes;
  Vec prev = estimate(n);
  if (q.max_nodes <= q.base_nodes) return prev;
  while (2 * n <= q.max_nodes) {
    n *= 2;
    Vec next = estimate(n);
    if ((next - prev).norm() <= q.rel_tol * (1.0 + next.norm())) return next;
    prev.swap(next);
    if (2 * n > q.max_nodes) {
      std::ostringstream msg;
      msg.precision(17);
      msg << what << ": quadrature did not converge at " << n << " nodes; last estimates ["
          << next.transpose() << "] and [" << prev.transpose() << "]";
      throw QuadratureError(msg.str());
    }
  }
  return prev;
}

}  // namespace twoscale
