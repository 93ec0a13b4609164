#include "doctest.h"

#include "twoscale/reconstruct.hpp"

#include <random>

using namespace twoscale;

namespace {

RegimeSpec gc(ElectricField f) {
  RegimeSpec r;
  r.kind = RegimeKind::gc_const;
  r.field = std::move(f);
  return r;
}

}  // namespace

TEST_CASE("expansion_sum at t = s returns the initial state") {
  const RegimeSpec r = gc(trig_field(1.0, 1.0, 0.3, 0));
  const Vec x0 = join(Vec3(0.1, 0.2, -0.3), Vec3(1, 0.5, -0.2));
  const TimeGrid g{0.2, 0.5, 3};
  const AveragedHierarchy h = solve_hierarchy(r, 2, x0, g);
  const TwoScaleSystem sys = make_system(r);
  for (int k = 0; k <= 2; ++k) {
    for (double eps : {0.5, 0.1, 0.01}) {
      CHECK((expansion_sum(r, k, eps, g.s, h.stack_at(0).truncated(k)) - x0).norm() < 1e-14);
      CHECK((expansion_sum(sys, k, eps, g.s, h.stack_at(0).truncated(k)) - x0).norm() < 1e-12);
    }
  }
}

TEST_CASE("partial sums telescope") {
  const RegimeSpec r = gc(trig_field(1.0, 1.0, 0.3, 0));
  const TwoScaleSystem sys = make_system(r);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto draw = [&] { return join(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))); };
  const StateStack st{0.7, {draw(), draw(), draw()}};
  const double eps = 0.03, s = 0.1;
  const double th = (st.t - s) / eps;
  const auto profiles = reconstruct_profiles(sys, 2, th, st);
  CHECK((expansion_sum(sys, 0, eps, s, st.truncated(0)) - reconstruct_X(sys, 0, th, st)).norm() < 1e-14);
  for (int k = 1; k <= 2; ++k) {
    const Vec diff = expansion_sum(sys, k, eps, s, st.truncated(k)) - expansion_sum(sys, k - 1, eps, s, st.truncated(k - 1));
    CHECK((diff - std::pow(eps, k) * profiles[k]).norm() < 1e-12);
    CHECK((profiles[k] - reconstruct_X(sys, k, th, st)).norm() < 1e-10);
  }
}

TEST_CASE("generic X^1 at theta = 0 is y^1") {
  const TwoScaleSystem sys = make_system(gc(trig_field(1.0, 1.0, 0.3, 0)));
  const Vec y1 = join(Vec3(0.3, -0.1, 0.2), Vec3(0.5, 0.6, -0.7));
  const StateStack st{0.0, {join(Vec3(0.2, 0.1, 0), Vec3(1, 0, 0)), y1}};
  CHECK((reconstruct_X(sys, 1, 0.0, st) - y1).norm() < 1e-12);
}

TEST_CASE("residual_extract") {
  const Trajectory ref{Vec3(1, 2, 3), Vec3(4, 5, 6)};
  CHECK(residual_extract(ref, {}, 0, 0.1) == ref);
  for (const Vec& r : residual_extract(ref, {ref}, 1, 0.1)) CHECK(r.norm() == 0.0);

  // X_eps = X^0 + eps g
  const Trajectory x0{Vec3(0.5, 0, 1), Vec3(-1, 2, 0.25)};
  const Trajectory g{Vec3(3, -1, 0.5), Vec3(0.125, 4, -2)};
  const double eps = 0.25;
  Trajectory xe;
  for (int i = 0; i < 2; ++i) xe.push_back(x0[i] + eps * g[i]);
  const Trajectory got = residual_extract(xe, {x0}, 1, eps);
  for (int i = 0; i < 2; ++i) CHECK((got[i] - g[i]).norm() < 1e-15);

  CHECK_THROWS_AS(residual_extract(ref, {Trajectory{Vec3::Zero()}}, 1, 0.1), DimensionError);
}

TEST_CASE("transported density") {
  const RegimeSpec r = gc(constant_field(Vec3::Zero()));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos_t(0.0, 1.0), ep(0.01, 0.5);
  const Density c = [](const PhaseState&) { return 2.5; };
  const Density lin = [](const PhaseState& x) { return 0.3 + 2.0 * x(0) - x(1) + 0.5 * x(2); };

  for (int n = 0; n < 10; ++n) {
    const PhaseState x = join(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)));
    const double s = 0.1, t = s + pos_t(rng), eps = ep(rng);
    // identity characteristic
    CHECK(std::abs(transported_density(lin, r, 0, eps, s, s, x) - lin(x)) < 1e-14);
    CHECK(transported_density(c, r, 0, eps, t, s, x) == 2.5);
    // free streaming along the field line
    PhaseState foot = x;
    foot(0) -= (t - s) * x(3);
    CHECK(std::abs(transported_density(lin, r, 0, eps, t, s, x) - lin(foot)) < 1e-8);
  }
  CHECK(transported_density(c, gc(trig_field(1, 1, 0, 0)), 2, 0.1, 0.6, 0.0, PhaseState(PhaseState::Zero(6))) == 2.5);
}
