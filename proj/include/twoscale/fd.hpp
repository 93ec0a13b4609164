#pragma once

// Central finite differences on the five-point stencil (fourth order).

#include "twoscale/types.hpp"

#include <cmath>
#include <limits>

namespace twoscale {

struct FDConfig {
  /// Base step for first derivatives; scaled by max(1, |x|) / |direction|.
  double h1 = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 5.0);
  /// Base step for second derivatives, scaled the same way.
  double h2 = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0);

  void validate() const {
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw ConfigError("fd: steps must be positive");
  }
};

/// d/dtau g(tau) at tau = 0. Works for any value type with + and scalar *.
template <class G>
auto stencil_first(G&& g, double step) {
  auto p1 = g(step);
  auto m1 = g(-step);
  auto p2 = g(2.0 * step);
  auto m2 = g(-2.0 * step);
  return decltype(p1)((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * step));
}

/// d^2/dtau^2 g(tau) at tau = 0, reusing the centre value.
template <class G, class V>
auto stencil_second(G&& g, const V& centre, double step) {
  auto p1 = g(step);
  auto m1 = g(-step);
  auto p2 = g(2.0 * step);
  auto m2 = g(-2.0 * step);
  return decltype(p1)((16.0 * (p1 + m1) - (p2 + m2) - 30.0 * centre) / (12.0 * step * step));
}

inline double scaled_step(double base, double point_norm, double dir_norm) {
  return base * std::max(1.0, point_norm) / dir_norm;
}

/// {grad f(x)}{dir}
template <class F>
Vec directional_first(F&& f, const Vec& x, const Vec& dir, double h) {
  const double n = dir.norm();
  if (n == 0.0) return Vec::Zero(f(x).size());
  const double step = scaled_step(h, x.norm(), n);
  return stencil_first([&](double tau) -> Vec { return f((x + tau * dir).eval()); }, step);
}

/// {grad^2 f(x)}{dir, dir}
template <class F>
Vec directional_second(F&& f, const Vec& x, const Vec& dir, double h, const Vec& fx) {
  const double n = dir.norm();
  if (n == 0.0) return Vec::Zero(fx.size());
  const double step = scaled_step(h, x.norm(), n);
  return stencil_second([&](double tau) -> Vec { return f((x + tau * dir).eval()); }, fx, step);
}

/// {grad^2 f(x)}{u, v} by polarisation of second directional derivatives.
template <class F>
Vec bilinear_second(F&& f, const Vec& x, const Vec& u, const Vec& v, double h) {
  const Vec fx = f(x);
  return 0.25 * (directional_second(f, x, (u + v).eval(), h, fx) -
                 directional_second(f, x, (u - v).eval(), h, fx));
}

/// Column-wise Jacobian.
template <class F>
Mat fd_jacobian(F&& f, const Vec& x, double h) {
  const Vec fx = f(x);
  Mat jac(fx.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    jac.col(j) = directional_first(f, x, Vec::Unit(x.size(), j), h);
  }
  return jac;
}

}  // namespace twoscale
