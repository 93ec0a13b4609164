#include "twoscale/fields.hpp"

#include "twoscale/fd.hpp"

#include <cmath>

namespace twoscale {

Vec3 ElectricField::second(double t, double theta, const Vec3& x, const Vec3& u, const Vec3& v) const {
  const auto h = hessian(t, theta, x);
  return Vec3(u.dot(h[0] * v), u.dot(h[1] * v), u.dot(h[2] * v));
}

ElectricField constant_field(const Vec3& e) {
  ElectricField f;
  f.value = [e](double, double, const Vec3&) { return e; };
  f.jacobian = [](double, double, const Vec3&) { return Mat3::Zero().eval(); };
  f.dt = [](double, double, const Vec3&) { return Vec3::Zero().eval(); };
  f.hessian = [](double, double, const Vec3&) {
    return std::array<Mat3, 3>{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  };
  f.dt_jacobian = f.jacobian;
  f.dtt = f.dt;
  return f;
}

namespace {

// Fields whose component i is amp * g_i(k x_{dep[i]} + w t + n theta) with g_i
// sin or cos. Derivatives of order m of sin(p) are sin(p + m pi/2).
struct PhaseComponents {
  double amp, k, w;
  int n;
  std::array<int, 3> dep;         // coordinate each component depends on, -1 for none
  std::array<double, 3> shift;    // 0 for sin, pi/2 for cos

  double phase(int i, double t, double theta, const Vec3& x) const {
    return k * x(dep[i]) + w * t + n * theta + shift[i];
  }
  // amp * d^m sin(p)
  double deriv(int i, int m, double t, double theta, const Vec3& x) const {
    if (dep[i] < 0) return 0.0;
    return amp * std::sin(phase(i, t, theta, x) + m * kPi / 2);
  }
};

ElectricField from_components(const PhaseComponents& pc) {
  ElectricField f;
  f.theta_dependent = pc.n != 0;
  f.value = [pc](double t, double th, const Vec3& x) {
    Vec3 e;
    for (int i = 0; i < 3; ++i) e(i) = pc.deriv(i, 0, t, th, x);
    return e;
  };
  f.jacobian = [pc](double t, double th, const Vec3& x) {
    Mat3 j = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      if (pc.dep[i] >= 0) j(i, pc.dep[i]) = pc.k * pc.deriv(i, 1, t, th, x);
    return j;
  };
  f.dt = [pc](double t, double th, const Vec3& x) {
    Vec3 e;
    for (int i = 0; i < 3; ++i) e(i) = pc.w * pc.deriv(i, 1, t, th, x);
    return e;
  };
  f.hessian = [pc](double t, double th, const Vec3& x) {
    std::array<Mat3, 3> h{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    for (int i = 0; i < 3; ++i)
      if (pc.dep[i] >= 0) h[i](pc.dep[i], pc.dep[i]) = pc.k * pc.k * pc.deriv(i, 2, t, th, x);
    return h;
  };
  f.dt_jacobian = [pc](double t, double th, const Vec3& x) {
    Mat3 j = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      if (pc.dep[i] >= 0) j(i, pc.dep[i]) = pc.k * pc.w * pc.deriv(i, 2, t, th, x);
    return j;
  };
  f.dtt = [pc](double t, double th, const Vec3& x) {
    Vec3 e;
    for (int i = 0; i < 3; ++i) e(i) = pc.w * pc.w * pc.deriv(i, 2, t, th, x);
    return e;
  };
  return f;
}

}  // namespace

ElectricField trig_field(double amplitude, double wavenumber, double omega, int harmonic) {
  return from_components({amplitude, wavenumber, omega, harmonic, {1, 2, 0}, {0.0, kPi / 2, 0.0}});
}

ElectricField transverse_sin_field(double amplitude, double wavenumber, double omega) {
  return from_components({amplitude, wavenumber, omega, 0, {-1, 0, -1}, {0.0, 0.0, 0.0}});
}

ElectricField resonant_field(const Vec3& c, double m, double omega, double phase) {
  // E = c cos(theta + phase) g(x3, t), g = 1 + m sin(x3 + omega t)
  ElectricField f;
  f.theta_dependent = true;
  auto carrier = [c, phase](double th) -> Vec3 { return c * std::cos(th + phase); };
  auto s = [omega](double t, const Vec3& x) { return std::sin(x(2) + omega * t); };
  auto co = [omega](double t, const Vec3& x) { return std::cos(x(2) + omega * t); };
  f.value = [=](double t, double th, const Vec3& x) -> Vec3 { return carrier(th) * (1.0 + m * s(t, x)); };
  f.jacobian = [=](double t, double th, const Vec3& x) -> Mat3 {
    Mat3 j = Mat3::Zero();
    j.col(2) = carrier(th) * (m * co(t, x));
    return j;
  };
  f.dt = [=](double t, double th, const Vec3& x) -> Vec3 { return carrier(th) * (m * omega * co(t, x)); };
  f.hessian = [=](double t, double th, const Vec3& x) {
    std::array<Mat3, 3> h{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    const Vec3 v = carrier(th) * (-m * s(t, x));
    for (int i = 0; i < 3; ++i) h[i](2, 2) = v(i);
    return h;
  };
  f.dt_jacobian = [=](double t, double th, const Vec3& x) -> Mat3 {
    Mat3 j = Mat3::Zero();
    j.col(2) = carrier(th) * (-m * omega * s(t, x));
    return j;
  };
  f.dtt = [=](double t, double th, const Vec3& x) -> Vec3 {
    return carrier(th) * (-m * omega * omega * s(t, x));
  };
  return f;
}

ElectricField field_from_function(ElectricField::ValueFn fn, bool theta_dependent) {
  const FDConfig fd;
  ElectricField f;
  f.theta_dependent = theta_dependent;
  f.value = fn;
  auto as_vec = [fn](double t, double th) {
    return [fn, t, th](const Vec& x) -> Vec { return fn(t, th, Vec3(x)); };
  };
  auto time_shift = [](double t, double h) { return scaled_step(h, std::abs(t), 1.0); };
  f.jacobian = [=](double t, double th, const Vec3& x) -> Mat3 {
    return fd_jacobian(as_vec(t, th), Vec(x), fd.h1);
  };
  f.dt = [=](double t, double th, const Vec3& x) -> Vec3 {
    return stencil_first([&](double tau) -> Vec3 { return fn(t + tau, th, x); }, time_shift(t, fd.h1));
  };
  f.hessian = [=](double t, double th, const Vec3& x) {
    std::array<Mat3, 3> h;
    for (int l = 0; l < 3; ++l) {
      for (int m = 0; m < 3; ++m) {
        const Vec col = bilinear_second(as_vec(t, th), Vec(x), Vec(Vec3::Unit(l)), Vec(Vec3::Unit(m)), fd.h2);
        for (int i = 0; i < 3; ++i) h[i](l, m) = col(i);
      }
    }
    return h;
  };
  f.dt_jacobian = [=](double t, double th, const Vec3& x) -> Mat3 {
    return stencil_first([&](double tau) -> Mat3 { return fd_jacobian(as_vec(t + tau, th), Vec(x), fd.h1); },
                         time_shift(t, fd.h2));
  };
  f.dtt = [=](double t, double th, const Vec3& x) -> Vec3 {
    return stencil_second([&](double tau) -> Vec3 { return fn(t + tau, th, x); }, fn(t, th, x),
                          time_shift(t, fd.h2));
  };
  return f;
}

}  // namespace twoscale
