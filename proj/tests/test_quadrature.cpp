#include "doctest.h"

#include "twoscale/model.hpp"
#include "twoscale/quadrature.hpp"

#include <random>

using namespace twoscale;

namespace {

// Oracle for the deviation operator: fine composite Simpson on [0, theta]
// and on [0, 2pi], independent of the spectral weights.
template <class F>
Mat simpson_deviation(F f, double theta, int panels = 20000) {
  auto integrate = [&](double b) {
    const double h = b / panels;
    Mat acc = f(0.0) + f(b);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return Mat(acc * h / 3.0);
  };
  return integrate(theta) - theta / kTwoPi * integrate(kTwoPi);
}

}  // namespace

TEST_CASE("config validation") {
  QuadratureConfig q;
  CHECK_NOTHROW(q.validate());
  q.base_nodes = 48;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q.base_nodes = 4;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q.base_nodes = 64;
  q.max_nodes = 32;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("osc_deviation of a constant vanishes") {
  for (double th : {0.0, 0.3, 2.0, kTwoPi}) {
    const Vec v = osc_deviation([](double) { return Vec::Constant(3, 2.5); }, th, 64);
    CHECK(v.norm() < 1e-13);
  }
}

TEST_CASE("osc_deviation of R(-s) at pi/2 is -calR(-pi/2)") {
  const Mat3 got = osc_deviation([](double s) { return rotation_R(-s); }, kPi / 2, 64);
  const Mat3 want = -rotation_calR(-kPi / 2);
  CHECK((got - want).norm() < 1e-13);
  Mat3 rows;
  rows << 0, 0, 0, 0, 1, -1, 0, 1, 1;
  CHECK((got - rows).norm() < 1e-13);
}

TEST_CASE("osc_deviation of calR(s) at pi is I - R(pi)") {
  const Mat3 got = osc_deviation([](double s) { return rotation_calR(s); }, kPi, 64);
  const Mat3 want = Mat3::Identity() - rotation_R(kPi);
  CHECK((got - want).norm() < 1e-13);
}

TEST_CASE("osc_deviation rejects theta outside the period") {
  auto f = [](double) { return Vec::Ones(1); };
  CHECK_THROWS_AS(osc_deviation(f, -0.1, 16), std::domain_error);
  CHECK_THROWS_AS(osc_deviation(f, 7.0, 16), std::domain_error);
}

TEST_CASE("osc_deviation agrees with an independent Simpson oracle") {
  auto f = [](double s) {
    Mat m(2, 1);
    m << std::exp(std::sin(s)), std::cos(3 * s) / (2.0 + std::cos(s));
    return m;
  };
  for (double th : {0.1, 1.0, 2.5, 4.0, 6.2}) {
    const Mat got = osc_deviation(f, th, 128);
    CHECK((got - simpson_deviation(f, th)).norm() < 1e-11);
  }
}

TEST_CASE("deviation at 2pi is zero and node matrix matches weights") {
  const PeriodicGrid& g = periodic_grid(32);
  CHECK(g.deviation_weights(kTwoPi).norm() < 1e-13);
  CHECK(g.deviation_weights(0.0).norm() < 1e-13);
  for (int j = 0; j < 32; j += 5) {
    CHECK((g.deviation_matrix().row(j) - g.deviation_weights(g.node(j))).norm() < 1e-13);
  }
}

TEST_CASE("integral of R equals theta P + calR") {
  for (double th : {kPi / 4, kPi, 1.5 * kPi}) {
    // int_0^th R = osc_deviation(R) + th * mean(R)
    const Mat3 dev = osc_deviation([](double s) { return rotation_R(s); }, th, 64);
    const Mat3 mean = period_mean([](double s) { return rotation_R(s); }, 64);
    const Mat3 want = th * projector_P() + rotation_calR(th);
    CHECK((dev + th * mean - want).norm() < 1e-12);
  }
}

TEST_CASE("refine_nodes doubles until agreement") {
  QuadratureConfig q;
  q.base_nodes = 8;
  int calls = 0;
  const Vec v = refine_nodes(
      [&](int n) {
        ++calls;
        return period_mean([](double s) { return Vec::Constant(1, std::exp(std::cos(s))); }, n);
      },
      q, "test");
  CHECK(std::abs(v(0) - 1.2660658777520082) < 1e-13);  // I0(1)
  CHECK(calls >= 2);

  // Successive deltas shrink for a smooth integrand.
  double last = 1e300;
  for (int n = 8; n <= 64; n *= 2) {
    auto mean_at = [](int m) {
      return period_mean([](double s) { return Vec::Constant(1, 1.0 / (1.5 + std::sin(s))); }, m)(0);
    };
    const double delta = std::abs(mean_at(2 * n) - mean_at(n));
    CHECK(delta <= last);
    last = delta;
  }
}

TEST_CASE("refine_nodes reports non-convergence with both estimates") {
  QuadratureConfig q;
  q.base_nodes = 8;
  q.max_nodes = 32;
  try {
    refine_nodes([](int n) { return Vec::Constant(1, static_cast<double>(n)); }, q, "probe");
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("probe") != std::string::npos);
    CHECK(msg.find("16") != std::string::npos);
    CHECK(msg.find("32") != std::string::npos);
  }
}

TEST_CASE("reduce_phase") {
  CHECK(reduce_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(reduce_phase(kTwoPi) == 0.0);
  CHECK(reduce_phase(3 * kTwoPi + 1.0) == doctest::Approx(1.0));
}
