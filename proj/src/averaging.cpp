#include "twoscale/averaging.hpp"

#include <cmath>
#include <string>

namespace twoscale {

StateStack StateStack::truncated(int k) const {
  if (k > order()) throw DimensionError("StateStack: requested order exceeds stack order");
  return StateStack{t, std::vector<Vec>(y.begin(), y.begin() + k + 1)};
}

void StateStack::validate(int dim) const {
  if (y.empty()) throw DimensionError("StateStack: empty stack");
  for (const Vec& v : y) {
    if (v.size() != dim) {
      throw DimensionError("StateStack: vector of length " + std::to_string(v.size()) +
                           ", system dimension " + std::to_string(dim));
    }
  }
}

namespace {

void check_order(int k, const StateStack& stack, const TwoScaleSystem& sys) {
  if (k < 0 || k > kMaxAveragingOrder) {
    throw Error("averaging: order " + std::to_string(k) + " is not supported (max " +
                std::to_string(kMaxAveragingOrder) + ")");
  }
  stack.validate(sys.dim);
  if (stack.order() < k) throw DimensionError("averaging: stack order below requested order");
}

Vec solve_flow_jacobian(const Mat& jac, const Vec& rhs) {
  Eigen::PartialPivLU<Mat> lu(jac);
  if (!(lu.rcond() > 1e-13)) {
    throw NumericalError("averaging: Jacobian of the periodic flow is singular");
  }
  return lu.solve(rhs);
}

class Engine {
 public:
  Engine(const TwoScaleSystem& sys, const AveragingOptions& opts) : sys_(sys), opts_(opts) {}

  Vec alpha0(double t, double theta, const Vec& y0) const {
    const auto& flow = sys_.flow;
    const Vec z = flow.Z(t, theta, y0);
    return solve_flow_jacobian(flow.jac_z(t, theta, y0), sys_.a(t, theta, z) - flow.dZ_dt(t, theta, y0));
  }

  CascadeGrids grids(double t, const std::vector<Vec>& ys, int k, int nodes) const {
    const PeriodicGrid& grid = periodic_grid(nodes);
    const Mat& dev_t = grid.deviation_matrix();
    const int d = sys_.dim;
    CascadeGrids g;
    g.nodes = nodes;

    Mat a0(d, nodes);
    for (int l = 0; l < nodes; ++l) a0.col(l) = alpha0(t, grid.node(l), ys[0]);
    push(g, std::move(a0), dev_t);

    for (int j = 1; j <= k; ++j) {
      const Mat d_dev = flow_derivative(t, ys, j - 1, nodes, g) * dev_t.transpose();
      Mat aj(d, nodes);
      std::vector<Vec> devs(j);
      for (int l = 0; l < nodes; ++l) {
        for (int i = 0; i < j; ++i) devs[i] = g.dev[i].col(l);
        aj.col(l) = local_terms(j, t, grid.node(l), ys, devs, g.alpha[0].col(l)) - d_dev.col(l);
      }
      push(g, std::move(aj), dev_t);
    }
    return g;
  }

  /// Order-k alpha at an arbitrary phase from the grids of orders < k.
  Vec alpha_at(int k, double t, double theta, const std::vector<Vec>& ys, int nodes) const {
    if (k == 0) return alpha0(t, theta, ys[0]);
    const CascadeGrids g = grids(t, ys, k - 1, nodes);
    const Eigen::RowVectorXd w = periodic_grid(nodes).deviation_weights(theta);
    std::vector<Vec> devs(k);
    for (int i = 0; i < k; ++i) devs[i] = g.alpha[i] * w.transpose();
    const Vec d_dev = flow_derivative(t, ys, k - 1, nodes, g) * w.transpose();
    return local_terms(k, t, theta, ys, devs, alpha0(t, theta, ys[0])) - d_dev;
  }

 private:
  static void push(CascadeGrids& g, Mat alpha, const Mat& dev_t) {
    g.mean.push_back(alpha.rowwise().mean());
    g.dev.push_back(alpha * dev_t.transpose());
    g.alpha.push_back(std::move(alpha));
  }

  /// Derivative of the order-m alpha grid along (t, y^0..y^m) -> (1, abar^0..abar^m).
  Mat flow_derivative(double t, const std::vector<Vec>& ys, int m, int nodes,
                      const CascadeGrids& base) const {
    double dir2 = 1.0;
    double point2 = t * t;
    for (int i = 0; i <= m; ++i) {
      dir2 += base.mean[i].squaredNorm();
      point2 += ys[i].squaredNorm();
    }
    const double step = scaled_step(opts_.fd.h1, std::sqrt(point2), std::sqrt(dir2));
    auto shifted = [&](double tau) -> Mat {
      std::vector<Vec> moved(m + 1);
      for (int i = 0; i <= m; ++i) moved[i] = ys[i] + tau * base.mean[i];
      return grids(t + tau, moved, m, nodes).alpha[m];
    };
    return stencil_first(shifted, step);
  }

  Vec grad_alpha0(double t, double theta, const Vec& y0, const Vec& w) const {
    if (opts_.use_analytic_closures && sys_.alpha0_jac) return sys_.alpha0_jac(t, theta, y0) * w;
    return directional_first([&](const Vec& y) { return alpha0(t, theta, y); }, y0, w, opts_.fd.h1);
  }

  Vec local_terms(int k, double t, double theta, const std::vector<Vec>& ys,
                  const std::vector<Vec>& devs, const Vec& a0) const {
    const Vec w1 = ys[1] + devs[0];
    if (opts_.route == LocalRoute::expanded) return expanded_terms(k, t, theta, ys, devs, a0);
    if (k == 1) return grad_alpha0(t, theta, ys[0], w1);
    const Vec w2 = ys[2] + devs[1];
    const Vec second = directional_second([&](const Vec& y) { return alpha0(t, theta, y); }, ys[0],
                                          w1, opts_.fd.h2, a0);
    return grad_alpha0(t, theta, ys[0], w2) + 0.5 * second;
  }

  Vec expanded_terms(int k, double t, double theta, const std::vector<Vec>& ys,
                     const std::vector<Vec>& devs, const Vec& a0) const {
    const auto& flow = sys_.flow;
    const auto& fd = opts_.fd;
    const Vec& y0 = ys[0];
    const Vec w1 = ys[1] + devs[0];
    const Mat jac = flow.jac_z(t, theta, y0);
    const Vec z = flow.Z(t, theta, y0);
    auto a_at = [&](const Vec& x) { return sys_.a(t, theta, x); };

    if (k == 1) {
      Vec rhs = directional_first(a_at, z, (jac * w1).eval(), fd.h1);
      if (!flow.time_independent) {
        const double step = scaled_step(fd.h1, std::abs(t), 1.0);
        rhs -= stencil_first([&](double tau) -> Vec { return flow.jac_z(t + tau, theta, y0) * w1; }, step);
      }
      if (flow.hess_z) {
        rhs -= tensor_apply(flow.hess_z(t, theta, y0), {a0, w1});
      } else if (!flow.linear) {
        rhs -= bilinear_second([&](const Vec& y) { return flow.Z(t, theta, y); }, y0, a0, w1, fd.h2);
      }
      return solve_flow_jacobian(jac, rhs);
    }

    if (!(flow.linear && flow.time_independent)) {
      throw Error("averaging: the expanded order-2 form requires a linear, time-independent flow");
    }
    const Vec w2 = ys[2] + devs[1];
    const Vec jw1 = jac * w1;
    const Vec rhs = directional_first(a_at, z, (jac * w2).eval(), fd.h1) +
                    0.5 * directional_second(a_at, z, jw1, fd.h2, a_at(z));
    return solve_flow_jacobian(jac, rhs);
  }

  const TwoScaleSystem& sys_;
  const AveragingOptions& opts_;
};

Vec stack_vectors(const std::vector<Vec>& parts) {
  Eigen::Index n = 0;
  for (const Vec& p : parts) n += p.size();
  Vec out(n);
  Eigen::Index off = 0;
  for (const Vec& p : parts) {
    out.segment(off, p.size()) = p;
    off += p.size();
  }
  return out;
}

}  // namespace

Vec alpha0(const TwoScaleSystem& sys, double t, double theta, const Vec& y0) {
  const AveragingOptions opts;
  return Engine(sys, opts).alpha0(t, theta, y0);
}

Vec abar0(const TwoScaleSystem& sys, double t, const Vec& y0, const QuadratureConfig& q) {
  q.validate();
  if (y0.size() != sys.dim) throw DimensionError("abar0: state length does not match system");
  return refine_nodes(
      [&](int n) { return period_mean([&](double th) { return alpha0(sys, t, th, y0); }, n); }, q,
      "abar0");
}

Vec theta_A(const TwoScaleSystem& sys, int k, const StateStack& stack, double theta,
            const AveragingOptions& opts) {
  check_order(k, stack, sys);
  if (!(theta >= 0.0 && theta <= kTwoPi)) throw std::domain_error("theta_A: theta outside [0, 2pi]");
  opts.validate();
  const Engine engine(sys, opts);
  return refine_nodes(
      [&](int n) -> Vec {
        const CascadeGrids g = engine.grids(stack.t, stack.y, k, n);
        return g.alpha[k] * periodic_grid(n).deviation_weights(theta).transpose();
      },
      opts.quad, "theta_A");
}

Vec alpha_k(const TwoScaleSystem& sys, int k, const StateStack& stack, double theta,
            const AveragingOptions& opts) {
  check_order(k, stack, sys);
  opts.validate();
  const Engine engine(sys, opts);
  if (k == 0) return engine.alpha0(stack.t, theta, stack.y[0]);
  const double reduced = reduce_phase(theta);
  return refine_nodes([&](int n) { return engine.alpha_at(k, stack.t, reduced, stack.y, n); },
                      opts.quad, "alpha_k");
}

Vec abar_k(const TwoScaleSystem& sys, int k, const StateStack& stack, const AveragingOptions& opts) {
  check_order(k, stack, sys);
  opts.validate();
  const Engine engine(sys, opts);
  return refine_nodes([&](int n) { return engine.grids(stack.t, stack.y, k, n).mean[k]; },
                      opts.quad, "abar_k");
}

Vec abar_all(const TwoScaleSystem& sys, const StateStack& stack, const AveragingOptions& opts) {
  const int k = stack.order();
  check_order(k, stack, sys);
  opts.validate();
  const Engine engine(sys, opts);
  return refine_nodes(
      [&](int n) { return stack_vectors(engine.grids(stack.t, stack.y, k, n).mean); }, opts.quad,
      "abar_all");
}

CascadeGrids cascade_grids(const TwoScaleSystem& sys, int k, const StateStack& stack, int nodes,
                           const AveragingOptions& opts) {
  check_order(k, stack, sys);
  opts.validate();
  return Engine(sys, opts).grids(stack.t, stack.y, k, nodes);
}

std::vector<Vec> deviations_at(const CascadeGrids& grids, double theta) {
  const Eigen::RowVectorXd w = periodic_grid(grids.nodes).deviation_weights(theta);
  std::vector<Vec> out;
  out.reserve(grids.alpha.size());
  for (const Mat& a : grids.alpha) out.emplace_back(a * w.transpose());
  return out;
}

}  // namespace twoscale
