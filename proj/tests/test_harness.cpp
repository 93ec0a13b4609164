#include "doctest.h"

#include "twoscale/config.hpp"
#include "twoscale/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace twoscale;

namespace {

std::vector<double> powers(int from, int to) {
  std::vector<double> e;
  for (int p = from; p <= to; ++p) e.push_back(std::ldexp(1.0, -p));
  return e;
}

/// Ordinary least squares in log space, written out independently.
double regression_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double a = 0, b = 0, c = 0, d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    a += lx;
    b += ly;
    c += lx * ly;
    d += lx * lx;
  }
  return (n * c - a * b) / (n * d - a * a);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sup_error") {
  const Trajectory a{Vec3(1, 2, 3), Vec3(0, 0, 0), Vec3(-1, 0.5, 2)};
  CHECK(sup_error(a, a) == 0.0);
  Trajectory b = a;
  for (auto& x : b) x += Vec3(3, 0, 4);
  CHECK(std::abs(sup_error(a, b) - 5.0) < 1e-15);
  Trajectory spike = a;
  spike[1](2) += 3.0;
  CHECK(sup_error(a, spike) == 3.0);
  CHECK_THROWS_AS(sup_error(a, Trajectory(a.begin(), a.end() - 1)), DimensionError);
}

TEST_CASE("fit_slope") {
  const auto eps = powers(3, 8);
  std::vector<double> lin, quad, noisy;
  for (double e : eps) {
    lin.push_back(7.0 * e);
    quad.push_back(3.0 * e * e);
    noisy.push_back(e * e * (1.0 + 0.1 * std::sin(1.0 / e)));
  }
  CHECK(std::abs(fit_slope(eps, lin) - 1.0) < 1e-10);
  CHECK(std::abs(fit_slope(eps, quad) - 2.0) < 1e-10);
  const double s = fit_slope(eps, noisy);
  CHECK(std::abs(s - regression_oracle(eps, noisy)) < 1e-12);
  CHECK(std::abs(s - 2.0) < 0.15);

  CHECK_THROWS_AS(fit_slope({0.1, 0.05, 0.025}, {1, 2, 3}), ConfigError);
  CHECK_THROWS_AS(fit_slope({0.1, 0.05, 0.025, 0.0}, {1, 2, 3, 4}), ConfigError);
  CHECK_THROWS_AS(fit_slope({0.1, 0.05, 0.025, 0.01}, {1, -2, 3, 4}), ConfigError);
}

TEST_CASE("sweep options validation") {
  SweepOptions o;
  CHECK_NOTHROW(o.validate());
  o.eps_list = {0.1, 0.05, 0.06, 0.01};
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o.eps_list = {0.1, 0.05, 0.01};
  CHECK_THROWS_AS(o.validate(), ConfigError);
}

TEST_CASE("exact cases sit below the reference floor") {
  RegimeSpec r;
  r.kind = RegimeKind::gc_const;
  r.field = constant_field(Vec3::Zero());
  SweepOptions o;
  o.grid = TimeGrid{0.0, 1.0, 50};
  // no gyration: order 0 is exact
  const ConvergenceReport along = run_convergence(r, join(Vec3::Zero(), Vec3(1, 0, 0)), o);
  // with gyration the order-1 sum carries the Larmor radius exactly
  o.orders = {1};
  const ConvergenceReport gyrating = run_convergence(r, join(Vec3::Zero(), Vec3(1, 0.5, 0)), o);
  for (double e : along.errors.at(0)) CHECK(e < 1e-10);
  for (const auto* rep : {&along, &gyrating}) {
    const int k = rep->orders.front();
    CHECK(rep->failures.empty());
    for (std::size_t e = 0; e < rep->eps_list.size(); ++e) {
      // what remains is the reference integrator's own error
      CHECK(rep->errors.at(k)[e] <= 2.0 * rep->reference_error[e] + 1e-13);
      CHECK(rep->below_floor.at(k)[e]);
    }
    CHECK_FALSE(rep->slopes.at(k).has_value());
  }
}

TEST_CASE("order-0 sweep for irs_const") {
  RegimeSpec r;
  r.kind = RegimeKind::irs_const;
  r.field = resonant_field(Vec3(0, 1, 0), 0.2, 0.0, 0.0);
  SweepOptions o;
  o.grid = TimeGrid{0.0, 1.0, 100};
  o.osc_resolution = 200;
  const ConvergenceReport rep = run_convergence(r, join(Vec3::Zero(), Vec3(1, 0.5, 0)), o);
  REQUIRE(rep.slopes.at(0).has_value());
  CHECK(rep.slope_within(0, 0.3));
  // monotone decay
  for (std::size_t e = 1; e < rep.eps_list.size(); ++e) CHECK(rep.errors.at(0)[e] < rep.errors.at(0)[e - 1]);
}

TEST_CASE("sweep is deterministic across thread counts") {
  RegimeSpec r;
  r.kind = RegimeKind::gc_const;
  r.field = trig_field(1, 1, 0, 0);
  SweepOptions o;
  o.orders = {0, 1, 2};
  o.grid = TimeGrid{0.0, 0.5, 40};
  o.threads = 1;
  const Vec x0 = join(Vec3::Zero(), Vec3(1, 0.5, 0));
  const ConvergenceReport a = run_convergence(r, x0, o);
  o.threads = 4;
  const ConvergenceReport b = run_convergence(r, x0, o);
  auto strip = [](nlohmann::ordered_json j) {
    j.erase("runtime_seconds");
    return j.dump();
  };
  CHECK(strip(report_to_json(a)) == strip(report_to_json(b)));

  const auto j = report_to_json(a);
  CHECK(j["errors"].size() == 15);
  CHECK(j["failures"].empty());
}

TEST_CASE("order beyond the regime maximum is rejected") {
  RegimeSpec r;
  r.kind = RegimeKind::flr_const;
  r.field = constant_field(Vec3::Zero());
  SweepOptions o;
  o.orders = {0, 1};
  CHECK_THROWS_AS(run_convergence(r, Vec(Vec::Zero(6)), o), ConfigError);
  CHECK_THROWS_AS(crosscheck(r, 1, 5, 0), ConfigError);
}

TEST_CASE("crosscheck is reproducible") {
  RegimeSpec r;
  r.kind = RegimeKind::flr_const;
  r.field = trig_field(1, 1, 0.5, 0);
  const CrosscheckReport a = crosscheck(r, 0, 8, 99);
  const CrosscheckReport b = crosscheck(r, 0, 8, 99);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  CHECK(a.max_rel() < 1e-7);
  CHECK(a.box.find("[-1,1]^3") != std::string::npos);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("report JSON on disk") {
  RegimeSpec r;
  r.kind = RegimeKind::gc_const;
  r.field = trig_field(1, 1, 0, 0);
  SweepOptions o;
  o.grid = TimeGrid{0.0, 0.25, 10};
  const ConvergenceReport rep = run_convergence(r, join(Vec3::Zero(), Vec3(1, 0.5, 0)), o);
  const auto path = (std::filesystem::temp_directory_path() / "twoscale_report_test.json").string();
  emit_report_json(rep, path, nlohmann::ordered_json{{"note", "test"}});
  const auto doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["errors"].size() == 5);
  CHECK(doc["config"]["note"] == "test");
  CHECK(doc.contains("runtime_seconds"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit_report_json(rep, "/nonexistent/dir/x.json", {}), IoError);
}
