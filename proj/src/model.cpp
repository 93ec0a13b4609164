#include "twoscale/model.hpp"

#include "twoscale/fd.hpp"

#include <random>

namespace twoscale {

Mat3 rotation_R(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, c, s,
       0.0, -s, c;
  return r;
}

Mat3 rotation_calR(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 r;
  r << 0.0, 0.0, 0.0,
       0.0, s, 1.0 - c,
       0.0, c - 1.0, s;
  return r;
}

Mat3 projector_P() {
  Mat3 p = Mat3::Zero();
  p(0, 0) = 1.0;
  return p;
}

DerivativeTensor::DerivativeTensor(int dim, int rank) : dim_(dim), rank_(rank) {
  if (dim <= 0 || rank < 1) throw DimensionError("DerivativeTensor: invalid shape");
  std::size_t size = 1;
  for (int r = 0; r < rank; ++r) size *= static_cast<std::size_t>(dim);
  data_.assign(size, 0.0);
}

DerivativeTensor DerivativeTensor::from_matrix(const Mat& jac) {
  if (jac.rows() != jac.cols()) throw DimensionError("DerivativeTensor: Jacobian must be square");
  const int d = static_cast<int>(jac.rows());
  DerivativeTensor t(d, 2);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) t.at({i, l}) = jac(i, l);
  return t;
}

DerivativeTensor DerivativeTensor::from_hessians(const std::vector<Mat>& hessians) {
  const int d = static_cast<int>(hessians.size());
  DerivativeTensor t(d, 3);
  for (int i = 0; i < d; ++i) {
    if (hessians[i].rows() != d || hessians[i].cols() != d) {
      throw DimensionError("DerivativeTensor: Hessian slice has wrong shape");
    }
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m) t.at({i, l, m}) = hessians[i](l, m);
  }
  return t;
}

std::size_t DerivativeTensor::flat(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != rank_) throw DimensionError("DerivativeTensor: wrong index count");
  std::size_t f = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_) throw DimensionError("DerivativeTensor: index out of range");
    f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return f;
}

double& DerivativeTensor::at(std::initializer_list<int> idx) { return data_[flat(idx)]; }
double DerivativeTensor::at(std::initializer_list<int> idx) const { return data_[flat(idx)]; }

Vec tensor_apply(const DerivativeTensor& tensor, const std::vector<Vec>& vs) {
  const int d = tensor.dim();
  if (static_cast<int>(vs.size()) != tensor.rank() - 1) {
    throw DimensionError("tensor_apply: expected " + std::to_string(tensor.rank() - 1) + " vectors");
  }
  for (const Vec& v : vs) {
    if (v.size() != d) throw DimensionError("tensor_apply: vector length does not match tensor");
  }
  // Contract the trailing index repeatedly: block size shrinks by d each pass.
  std::vector<double> work = tensor.data();
  std::size_t block = work.size();
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
    const std::size_t outer = block / static_cast<std::size_t>(d);
    std::vector<double> next(outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l) acc += work[o * d + l] * (*it)(l);
      next[o] = acc;
    }
    work.swap(next);
    block = outer;
  }
  return Eigen::Map<const Vec>(work.data(), d);
}

double relative_deviation(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(b.norm(), 1.0);
}

SystemCheck check_system(const TwoScaleSystem& sys, int samples, std::uint64_t seed,
                         const PointSampler& sampler) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SampleBox box;
  const FDConfig fd;
  const int d = sys.dim;
  SystemCheck out;
  for (int n = 0; n < samples; ++n) {
    const double t = box.t_min + (box.t_max - box.t_min) * unit(rng);
    const double theta = kTwoPi * unit(rng);
    Vec z(d);
    if (sampler) {
      z = sampler(static_cast<std::uint64_t>(n));
    } else {
      for (int i = 0; i < d; ++i) z(i) = box.coord_min + (box.coord_max - box.coord_min) * unit(rng);
    }
    const auto& flow = sys.flow;
    out.a_periodicity = std::max(out.a_periodicity,
                                 relative_deviation(sys.a(t, theta + kTwoPi, z), sys.a(t, theta, z)));
    const Vec zt = flow.Z(t, theta, z);
    out.flow_periodicity =
        std::max(out.flow_periodicity, relative_deviation(flow.Z(t, theta + kTwoPi, z), zt));

    const Vec dtheta = stencil_first([&](double tau) -> Vec { return flow.Z(t, theta + tau, z); }, 1e-3);
    out.flow_ode = std::max(out.flow_ode, relative_deviation(dtheta, sys.b(t, zt)));

    out.flow_identity = std::max(out.flow_identity, relative_deviation(flow.Z(t, 0.0, z), z));
    const Mat j0 = flow.jac_z(t, 0.0, z);
    out.flow_identity = std::max(out.flow_identity, (j0 - Mat::Identity(d, d)).norm());

    const Mat jac = flow.jac_z(t, theta, z);
    const Mat jac_fd = fd_jacobian([&](const Vec& x) { return flow.Z(t, theta, x); }, z, fd.h1);
    out.flow_jacobian = std::max(out.flow_jacobian, (jac - jac_fd).norm() / std::max(1.0, jac_fd.norm()));

    const Vec zdt = stencil_first([&](double tau) -> Vec { return flow.Z(t + tau, theta, z); }, 1e-3);
    out.flow_dt = std::max(out.flow_dt, relative_deviation(flow.dZ_dt(t, theta, z), zdt));
  }
  return out;
}

int max_order(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::irs_const: return 1;
    case RegimeKind::gc_const: return 2;
    case RegimeKind::flr_const: return 0;
    case RegimeKind::gc_variable: return 1;
  }
  return 0;
}

std::string_view to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::irs_const: return "irs_const";
    case RegimeKind::gc_const: return "gc_const";
    case RegimeKind::flr_const: return "flr_const";
    case RegimeKind::gc_variable: return "gc_variable";
  }
  return "unknown";
}

std::optional<RegimeKind> parse_regime_kind(std::string_view name) {
  for (RegimeKind k : {RegimeKind::irs_const, RegimeKind::gc_const, RegimeKind::flr_const,
                       RegimeKind::gc_variable}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace twoscale
