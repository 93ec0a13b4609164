#include "twoscale/regimes.hpp"

#include "twoscale/reconstruct.hpp"

#include <cmath>
#include <string>

namespace twoscale {

Vec join(const Vec3& x, const Vec3& v) {
  Vec s(6);
  s << x, v;
  return s;
}

// ---------------------------------------------------------------------------
// Variable field geometry
// ---------------------------------------------------------------------------

double VariableFieldGeometry::omega(const Vec3& x) const {
  const double r = std::hypot(x(0), x(1));
  if (!(r >= r_min)) {
    throw AxisError("gc_variable: point within " + std::to_string(r_min) + " of the field axis");
  }
  return r;
}

Vec3 VariableFieldGeometry::direction(const Vec3& x) const {
  return Vec3(-x(1), x(0), 0.0) / omega(x);
}

Mat3 VariableFieldGeometry::direction_jacobian(const Vec3& x) const {
  const double r = omega(x);
  const Vec3 m(-x(1), x(0), 0.0);
  const double r3 = r * r * r;
  Mat3 d = Mat3::Zero();
  d.col(0) = Vec3(0.0, 1.0, 0.0) / r - m * (x(0) / r3);
  d.col(1) = Vec3(-1.0, 0.0, 0.0) / r - m * (x(1) / r3);
  return d;
}

namespace {

Mat3 cross_matrix(const Vec3& m) {
  Mat3 c;
  c << 0.0, -m(2), m(1),
       m(2), 0.0, -m(0),
       -m(1), m(0), 0.0;
  return c;
}

}  // namespace

Mat3 VariableFieldGeometry::gyration(double theta, const Vec3& z) const {
  // Rotation of angle -theta about M(z).
  const Vec3 m = direction(z);
  const Mat3 mm = m * m.transpose();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return mm + c * (Mat3::Identity() - mm) - s * cross_matrix(m);
}

Mat3 VariableFieldGeometry::gyration_jacobian(double theta, const Vec3& z, const Vec3& w) const {
  const Vec3 m = direction(z);
  const Mat3 dm = direction_jacobian(z);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 out;
  for (int j = 0; j < 3; ++j) {
    const Vec3 d = dm.col(j);
    out.col(j) = (1.0 - c) * (d * m.dot(w) + m * d.dot(w)) - s * d.cross(w);
  }
  return out;
}

Mat3 VariableFieldGeometry::mean_gyration(const Vec3& y) const {
  const double r2 = std::pow(omega(y), 2);
  Mat3 a;
  a << y(1) * y(1), -y(0) * y(1), 0.0,
       -y(0) * y(1), y(0) * y(0), 0.0,
       0.0, 0.0, 0.0;
  return a / r2;
}

Vec3 VariableFieldGeometry::mean_drift(const Vec3& y, const Vec3& u) const {
  const double r2 = std::pow(omega(y), 2);
  return Vec3((y(1) * u(0) - y(0) * u(1)) * u(1) / r2,
              (y(0) * u(1) - y(1) * u(0)) * u(0) / r2,
              0.0);
}

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

void RegimeSpec::validate() const {
  if (!field.value || !field.jacobian || !field.dt || !field.hessian || !field.dt_jacobian || !field.dtt) {
    throw ConfigError("regime: electric field is incomplete");
  }
  if (kind != RegimeKind::irs_const && field.theta_dependent) {
    throw ConfigError(std::string("regime ") + std::string(to_string(kind)) +
                      " requires an electric field independent of theta");
  }
  if (!(geometry.r_min > 0.0)) throw ConfigError("regime: r_min must be positive");
}

namespace {

const Vec3 kE1 = Vec3::UnitX();
const Vec3 kE3 = Vec3::UnitZ();

Mat block_diag(const Mat3& a, const Mat3& b) {
  Mat m = Mat::Zero(6, 6);
  m.topLeftCorner<3, 3>() = a;
  m.bottomRightCorner<3, 3>() = b;
  return m;
}

void set_rotation_flow(TwoScaleSystem& sys) {
  sys.flow.Z = [](double, double th, const Vec& z) { return join(pos(z), rotation_R(th) * vel(z)); };
  sys.flow.jac_z = [](double, double th, const Vec&) { return block_diag(Mat3::Identity(), rotation_R(th)); };
  sys.flow.dZ_dt = [](double, double, const Vec&) { return Vec(Vec::Zero(6)); };
  sys.flow.hess_z = [](double, double, const Vec&) { return DerivativeTensor(6, 3); };
  sys.flow.time_independent = true;
  sys.flow.linear = true;
}

}  // namespace

TwoScaleSystem make_system(const RegimeSpec& regime) {
  regime.validate();
  const ElectricField f = regime.field;
  TwoScaleSystem sys;
  sys.name = std::string(to_string(regime.kind));
  sys.dim = 6;
  sys.smoothness = 2;

  switch (regime.kind) {
    case RegimeKind::irs_const:
    case RegimeKind::gc_const: {
      sys.a = [f](double t, double th, const Vec& x) { return join(vel(x), f(t, th, pos(x))); };
      sys.b = [](double, const Vec& x) { return join(Vec3::Zero(), vel(x).cross(kE1)); };
      set_rotation_flow(sys);
      sys.alpha0_jac = [f](double t, double th, const Vec& y) {
        Mat j = Mat::Zero(6, 6);
        j.topRightCorner<3, 3>() = rotation_R(th);
        j.bottomLeftCorner<3, 3>() = rotation_R(-th) * f.jacobian(t, th, pos(y));
        return j;
      };
      break;
    }
    case RegimeKind::flr_const: {
      const Mat3 p = projector_P();
      sys.a = [f, p](double t, double th, const Vec& x) { return join(p * vel(x), f(t, th, pos(x))); };
      sys.b = [p](double, const Vec& x) {
        const Vec3 v = vel(x);
        return join(v - p * v, v.cross(kE1));
      };
      sys.flow.Z = [](double, double th, const Vec& z) {
        return join(pos(z) + rotation_calR(th) * vel(z), rotation_R(th) * vel(z));
      };
      sys.flow.jac_z = [](double, double th, const Vec&) {
        Mat j = block_diag(Mat3::Identity(), rotation_R(th));
        j.topRightCorner<3, 3>() = rotation_calR(th);
        return j;
      };
      sys.flow.dZ_dt = [](double, double, const Vec&) { return Vec(Vec::Zero(6)); };
      sys.flow.hess_z = [](double, double, const Vec&) { return DerivativeTensor(6, 3); };
      sys.flow.time_independent = true;
      sys.flow.linear = true;
      sys.alpha0_jac = [f, p](double t, double th, const Vec& y) {
        const Mat3 cr = rotation_calR(th);
        const Mat3 jac = f.jacobian(t, th, pos(y) + cr * vel(y));
        const Mat3 crm = rotation_calR(-th);
        const Mat3 rm = rotation_R(-th);
        Mat j(6, 6);
        j << crm * jac, p + crm * jac * cr,
             rm * jac, rm * jac * cr;
        return j;
      };
      break;
    }
    case RegimeKind::gc_variable: {
      const VariableFieldGeometry g = regime.geometry;
      sys.a = [f](double t, double th, const Vec& x) {
        return join(vel(x), f(t, th, pos(x)) + vel(x).cross(kE3));
      };
      sys.b = [g](double, const Vec& x) { return join(Vec3::Zero(), vel(x).cross(g.direction(pos(x)))); };
      sys.flow.Z = [g](double, double th, const Vec& z) {
        return join(pos(z), g.gyration(th, pos(z)) * vel(z));
      };
      sys.flow.jac_z = [g](double, double th, const Vec& z) {
        Mat j = block_diag(Mat3::Identity(), g.gyration(th, pos(z)));
        j.bottomLeftCorner<3, 3>() = g.gyration_jacobian(th, pos(z), vel(z));
        return j;
      };
      sys.flow.dZ_dt = [](double, double, const Vec&) { return Vec(Vec::Zero(6)); };
      sys.flow.time_independent = true;
      sys.flow.linear = false;
      break;
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

namespace {

struct Frames {
  Mat3 P = projector_P();
  Mat3 Q = Mat3::Identity() - projector_P();
  Mat3 Rp = rotation_R(kPi / 2) - projector_P();   // R(pi/2) - P
  Mat3 Rm = rotation_R(-kPi / 2) - projector_P();  // R(-pi/2) - P
};

void check_regime_order(const RegimeSpec& regime, int k, const StateStack& stack) {
  if (k < 0 || k > regime.max_order()) {
    throw Error("regime " + std::string(to_string(regime.kind)) + ": order " + std::to_string(k) +
                " exceeds max_order " + std::to_string(regime.max_order()));
  }
  stack.validate(6);
  if (stack.order() < k) throw DimensionError("regime: stack order below requested order");
}

Vec stack_parts(const std::vector<Vec>& parts) {
  Vec out(6 * static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) out.segment(6 * i, 6) = parts[i];
  return out;
}

std::vector<Vec> gc_rhs(const ElectricField& f, int k, const StateStack& st) {
  const Frames fr;
  const Mat3& P = fr.P;
  const Mat3& Q = fr.Q;
  const Mat3& Rp = fr.Rp;
  const Mat3& Rm = fr.Rm;
  const double t = st.t;
  const Vec3 y0 = pos(st.y[0]), u0 = vel(st.y[0]);
  const Vec3 e = f(t, 0.0, y0);
  std::vector<Vec> out{join(P * u0, P * e)};
  if (k == 0) return out;

  const Mat3 J = f.jacobian(t, 0.0, y0);
  const Vec3 et = f.dt(t, 0.0, y0);
  const Vec3 y1 = pos(st.y[1]), u1 = vel(st.y[1]);
  const Vec3 upar = P * u0;
  const double trQJ = (Q * J).trace();
  const double trRmJ = (Rm * J).trace();
  // mean of R(-theta) J calR(theta) = P J Rp + 1/2 tr(Q J) Rm + 1/2 tr(Rm J) Q
  const Mat3 meanRJcalR = P * J * Rp + 0.5 * trQJ * Rm + 0.5 * trRmJ * Q;
  out.push_back(join(P * u1 + Rp * e, P * J * y1 + meanRJcalR * u0 - Rm * J * upar - Rm * et));
  if (k == 1) return out;

  const Vec3 y2 = pos(st.y[2]), u2 = vel(st.y[2]);
  const Mat3 Jt = f.dt_jacobian(t, 0.0, y0);
  const Vec3 ett = f.dtt(t, 0.0, y0);
  const Vec3 epar = P * e;
  const Vec3 u1par = P * u1;
  auto H = [&](const Vec3& a, const Vec3& b) { return f.second(t, 0.0, y0, a, b); };
  const Mat3 PmR = P - rotation_R(-kPi / 2);

  const Vec3 dy2 = P * u2 + Rp * J * y1 + Q * (J * upar + et) + (P * J * Q + Rp * J * Rp) * u0 -
                   0.5 * trQJ * Q * u0 - 0.5 * trRmJ * Rp * u0;

  Vec3 du2 = P * J * y2 + meanRJcalR * u1;
  du2 += P * J * e;
  du2 -= (P * J * P + 0.5 * trQJ * Q + 0.5 * trRmJ * Rp) * e;
  // mean of 1/2 R(-theta) {grad^2 E}{y1 + calR(theta) u0}^2
  const Vec3 a = Q * u0, b = Rp * u0;
  du2 += 0.5 * P * H(y1, y1) + P * H(y1, b) - 0.5 * Q * H(y1, b) - 0.5 * Rp * H(y1, a) +
         0.25 * P * H(a, a) + 0.75 * P * H(b, b) - 0.5 * Q * H(b, b) - 0.5 * Rp * H(a, b);
  du2 += PmR * H(y1, upar);
  du2 += Q * (H(upar, upar) + Jt * upar);
  du2 -= P * H(Q * u0, upar);
  du2 -= 0.25 * Q * H(Q * u0, upar) + 0.75 * Rm * H(Rp * u0, upar);
  du2 -= (-Q * J + P * J * Q + 0.25 * Q * J * Q + 0.75 * Rm * J * Rp) * epar;
  du2 += PmR * J * u1par;
  du2 += PmR * J * Rp * e;
  du2 += PmR * Jt * y1;
  du2 += Q * (Jt * upar + ett);
  du2 -= P * Jt * Q * u0;
  du2 -= (0.25 * Q * Jt * Q + 0.75 * Rm * Jt * Rp) * u0;
  out.push_back(join(dy2, du2));
  return out;
}

// IRS averaged fields from per-node samples on one grid.
Vec irs_rhs_on_grid(const ElectricField& f, int k, const StateStack& st, int n) {
  const Frames fr;
  const PeriodicGrid& grid = periodic_grid(n);
  const Mat& S = grid.deviation_matrix();
  const double t = st.t;
  const Vec3 y0 = pos(st.y[0]), u0 = vel(st.y[0]);

  Mat rotE(3, n);
  for (int l = 0; l < n; ++l) {
    const double th = grid.node(l);
    rotE.col(l) = rotation_R(-th) * f(t, th, y0);
  }
  const Vec3 meanE = rotE.rowwise().mean();
  std::vector<Vec> out{join(fr.P * u0, meanE)};
  if (k >= 1) {
    const Vec3 y1 = pos(st.y[1]), u1 = vel(st.y[1]);
    const Vec3 upar = fr.P * u0;
    const Mat devE = rotE * S.transpose();  // osc_deviation(R(-s) E(s)) at the nodes
    Mat rotJu(3, n), rotEt(3, n);
    Mat3 meanRJ = Mat3::Zero(), meanRJcalR = Mat3::Zero();
    Vec3 dbl = Vec3::Zero();
    for (int l = 0; l < n; ++l) {
      const double th = grid.node(l);
      const Mat3 rj = rotation_R(-th) * f.jacobian(t, th, y0);
      meanRJ += rj;
      meanRJcalR += rj * rotation_calR(th);
      rotJu.col(l) = rj * upar;
      rotEt.col(l) = rotation_R(-th) * f.dt(t, th, y0);
      dbl += rotation_R(th) * Vec3(devE.col(l));
    }
    meanRJ /= n;
    meanRJcalR /= n;
    dbl /= n;
    const Vec3 devJu = (rotJu * S.transpose()).rowwise().mean();
    const Vec3 devEt = (rotEt * S.transpose()).rowwise().mean();
    out.push_back(join(fr.P * u1 + dbl - fr.Rp * meanE,
                       meanRJ * y1 + meanRJcalR * u0 - devJu - devEt));
  }
  return stack_parts(out);
}

Vec flr_rhs_on_grid(const ElectricField& f, const StateStack& st, int n) {
  const PeriodicGrid& grid = periodic_grid(n);
  const Vec3 y0 = pos(st.y[0]), u0 = vel(st.y[0]);
  Vec3 mp = Vec3::Zero(), mv = Vec3::Zero();
  for (int l = 0; l < n; ++l) {
    const double th = grid.node(l);
    const Vec3 e = f(st.t, th, y0 + rotation_calR(th) * u0);
    mp += rotation_calR(-th) * e;
    mv += rotation_R(-th) * e;
  }
  return join(projector_P() * u0 + mp / n, mv / n);
}

}  // namespace

Vec regime_rhs(const RegimeSpec& regime, int k, const StateStack& stack, const QuadratureConfig& q) {
  check_regime_order(regime, k, stack);
  regime.validate();
  const ElectricField& f = regime.field;
  switch (regime.kind) {
    case RegimeKind::gc_const:
      return stack_parts(gc_rhs(f, k, stack));
    case RegimeKind::irs_const:
      q.validate();
      return refine_nodes([&](int n) { return irs_rhs_on_grid(f, k, stack, n); }, q, "irs_const rhs");
    case RegimeKind::flr_const:
      q.validate();
      return refine_nodes([&](int n) { return flr_rhs_on_grid(f, stack, n); }, q, "flr_const rhs");
    case RegimeKind::gc_variable: {
      if (k > 0) {
        throw Error("regime gc_variable: no closed-form averaged system at order 1; use the generic engine");
      }
      const auto& g = regime.geometry;
      const Vec3 y0 = pos(stack.y[0]), u0 = vel(stack.y[0]);
      const Mat3 abar = g.mean_gyration(y0);
      const Vec3 e = f(stack.t, 0.0, y0);
      return join(abar * u0, g.mean_drift(y0, u0) + abar * e + u0.cross(abar * kE3));
    }
  }
  return {};
}

PhaseState regime_reconstruct(const RegimeSpec& regime, int k, double theta, const StateStack& stack,
                              const AveragingOptions& opts) {
  check_regime_order(regime, k, stack);
  regime.validate();
  const ElectricField& f = regime.field;
  const double th = reduce_phase(theta);
  const double t = stack.t;
  const Vec3 y0 = pos(stack.y[0]), u0 = vel(stack.y[0]);
  const Mat3 R = rotation_R(th);
  const Mat3 cR = rotation_calR(th);

  switch (regime.kind) {
    case RegimeKind::gc_const: {
      if (k == 0) return join(y0, R * u0);
      const Vec3 e = f(t, 0.0, y0);
      const Vec3 y1 = pos(stack.y[1]), u1 = vel(stack.y[1]);
      if (k == 1) return join(y1 + cR * u0, R * u1 + cR * e);
      const Frames fr;
      const Mat3 I = Mat3::Identity();
      const Mat3 J = f.jacobian(t, 0.0, y0);
      const Vec3 et = f.dt(t, 0.0, y0);
      const Vec3 y2 = pos(stack.y[2]), u2 = vel(stack.y[2]);
      const Mat3 coef = fr.P * J * (I - R) + 0.5 * fr.Rp * J * (cR + fr.Rp) +
                        0.5 * (rotation_R(th - kPi / 2) - fr.P) * J * fr.Rp;
      return join(y2 + cR * u1 + (I - R) * e,
                  R * u2 + cR * J * y1 - (R - I) * (J * fr.P * u0 + et) + coef * u0);
    }
    case RegimeKind::irs_const: {
      if (k == 0) return join(y0, R * u0);
      const Vec3 y1 = pos(stack.y[1]), u1 = vel(stack.y[1]);
      const Vec3 dev = refine_nodes(
          [&](int n) -> Vec {
            return osc_deviation([&](double s) -> Vec3 { return rotation_R(-s) * f(t, s, y0); }, th, n);
          },
          opts.quad, "irs_const reconstruction");
      return join(y1 + cR * u0, R * u1 + R * dev);
    }
    case RegimeKind::flr_const:
      return join(y0 + cR * u0, R * u0);
    case RegimeKind::gc_variable: {
      const auto& g = regime.geometry;
      if (k == 0) return join(y0, g.gyration(th, y0) * u0);
      const double om = g.omega(y0);
      const Vec3 y1 = pos(stack.y[1]);
      const double c1 = std::cos(th) - 1.0;
      const double s = std::sin(th);
      const double yu = y0(0) * u0(0) + y0(1) * u0(1);
      Vec3 x1;
      x1(0) = (y0(0) * om * c1 * u0(2) + y0(0) * yu * s + y1(0) * om * om) / (om * om);
      x1(1) = (y0(1) * om * c1 * u0(2) + y0(1) * yu * s + y1(1) * om * om) / (om * om);
      x1(2) = (-yu * c1 + y1(2) * om + s * u0(2) * om) / om;
      const PhaseState generic = reconstruct_X(make_system(regime), 1, th, stack, opts);
      return join(x1, vel(generic));
    }
  }
  return {};
}

Vec3 variable_Y1_position_rhs(const Vec3& y0, const Vec3& u0, const Vec3& y1, const Vec3& u1,
                              const Vec3& e, const VariableFieldGeometry& geom) {
  const double om = geom.omega(y0);
  const double om2 = om * om, om3 = om2 * om, om4 = om2 * om2;
  const double a = y0(0), b = y0(1);
  const double U1 = u0(0), U2 = u0(1), U3 = u0(2);
  const double V1 = u1(0), V2 = u1(1);
  const double K = -U1 * b + U2 * a;
  Vec3 r;
  r(0) = ((-om2 * b * U2 + 2 * a * b * K) * y1(0) + ((2 * U1 * b - U2 * a) * om2 + 2 * b * b * K) * y1(1) +
          b * b * V1 * om2 - a * b * om2 * V2 - om3 * a * e(2) - b * U3 * om3 - 2 * b * U3 * K * om) /
         om4;
  r(1) = (((2 * U2 * a - U1 * b) * om2 - 2 * a * a * K) * y1(0) + (-om2 * a * U1 - 2 * a * b * K) * y1(1) -
          a * b * om2 * V1 + a * a * V2 * om2 - om3 * b * e(2) + om3 * a * U3 + 2 * a * U3 * K * om) /
         om4;
  r(2) = (om2 * a * e(0) + om2 * b * e(1) + (U2 * a + U1 * U1 - U1 * b + U2 * U2) * om2 -
          std::pow(a * U1 + b * U2, 2)) /
         om3;
  return r;
}

}  // namespace twoscale
