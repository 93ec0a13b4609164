// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
//
// usage: acceptance <path to the twoscale executable> <scratch directory>

#include "twoscale/config.hpp"
#include "twoscale/harness.hpp"
#include "twoscale/reconstruct.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace twoscale;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RegimeSpec regime(RegimeKind kind, ElectricField f) {
  RegimeSpec r;
  r.kind = kind;
  r.field = std::move(f);
  return r;
}

Vec gc_start() { return join(Vec3::Zero(), Vec3(1.0, 0.5, 0.0)); }

/// Slopes against tolerances, every point above the floor, no failed eps.
bool sweep_ok(const ConvergenceReport& rep, const std::vector<double>& tol, std::string& detail) {
  bool ok = rep.failures.empty();
  std::ostringstream os;
  for (std::size_t j = 0; j < rep.orders.size(); ++j) {
    const int k = rep.orders[j];
    const auto& sl = rep.slopes.at(k);
    int below = 0;
    for (bool b : rep.below_floor.at(k)) below += b;
    os << "k=" << k << " slope " << (sl ? fmt("%.3f", *sl) : std::string("none")) << " (want " << k + 1 << "+-"
       << tol[j] << ", " << below << " below floor); ";
    ok = ok && below == 0 && rep.slope_within(k, tol[j]);
  }
  os << "runtime " << fmt("%.2f", rep.runtime_seconds) << " s";
  if (!rep.failures.empty()) os << "; " << rep.failures.size() << " eps failed";
  detail = os.str();
  return ok;
}

Vec off_axis(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.5, 2.0), phi(0.0, kTwoPi);
  const double rad = r(rng), a = phi(rng);
  return join(Vec3(rad * std::cos(a), rad * std::sin(a), u(rng)), Vec3(u(rng), u(rng), u(rng)));
}

void criterion1() {
  SweepOptions o;
  o.orders = {0, 1, 2};
  o.osc_resolution = 1000;
  const auto start = std::chrono::steady_clock::now();
  const auto rep = run_convergence(regime(RegimeKind::gc_const, trig_field(1.0, 1.0, 0.0, 0)), gc_start(), o);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string d;
  const bool ok = sweep_ok(rep, {0.3, 0.3, 0.4}, d);
  report(1, ok && wall < 60.0, "gc_const convergence: " + d);
}

void criterion2() {
  const auto r = regime(RegimeKind::irs_const, resonant_field(Vec3(0, 1, 0), 0.2, 0.0, 0.0));
  SweepOptions o;
  o.orders = {0, 1};
  o.osc_resolution = 1000;
  const auto rep = run_convergence(r, gc_start(), o);
  std::string d;
  bool ok = sweep_ok(rep, {0.3, 0.3}, d);
  // resonant drift of the order-0 averaged system at t = s
  const StateStack st{0.0, {gc_start()}};
  const double drift = regime_rhs(r, 0, st)(4);
  const double generic = abar0(make_system(r), 0.0, gc_start())(4);
  ok = ok && std::abs(drift - 0.5) < 1e-6 && std::abs(generic - 0.5) < 1e-6;
  report(2, ok, "irs_const convergence: " + d + "; dU0_2/dt at t=s " + fmt("%.12f", drift) + " (generic " +
                    fmt("%.12f", generic) + ", want 0.5 to 1e-6)");
}

void criterion3() {
  SweepOptions o;
  o.osc_resolution = 1000;
  const auto rep = run_convergence(regime(RegimeKind::flr_const, transverse_sin_field(1.0, 1.0, 0.0)), gc_start(), o);
  std::string d;
  const bool ok = sweep_ok(rep, {0.3}, d);
  report(3, ok, "flr_const convergence: " + d);
}

void criterion4() {
  const auto r = regime(RegimeKind::gc_variable, constant_field(Vec3(0.1, 0.0, 0.2)));
  const TwoScaleSystem sys = make_system(r);
  std::mt19937_64 rng(2024);
  const SystemCheck c = check_system(sys, 100, 7, [&](std::uint64_t) { return off_axis(rng); });
  bool ok = c.flow_ode < 1e-5;
  std::string d = "flow-ODE residual " + fmt("%.2e", c.flow_ode) + " (want < 1e-5); ";

  SweepOptions o;
  o.osc_resolution = 1000;
  const auto rep = run_convergence(r, join(Vec3(1, 0, 0), Vec3(0.3, 0.5, 0.2)), o);
  std::string sd;
  ok = sweep_ok(rep, {0.3}, sd) && ok;
  d += sd + "; ";

  const auto field = regime(RegimeKind::gc_variable, trig_field(1.0, 1.0, 0.7, 0));
  const CrosscheckReport y1 = crosscheck(field, 1, 50, 11);
  ok = ok && y1.rhs_rel < 1e-5;
  d += "Y1 position rhs vs generic max rel " + fmt("%.2e", y1.rhs_rel) + " (want < 1e-5)";
  report(4, ok, "variable field: " + d);
}

void criterion5() {
  const std::vector<RegimeSpec> cases{
      regime(RegimeKind::gc_const, trig_field(1.0, 1.0, 0.7, 0)),
      regime(RegimeKind::irs_const, resonant_field(Vec3(0.3, 1.0, -0.5), 0.2, 0.5, 0.3)),
      regime(RegimeKind::irs_const, trig_field(1.0, 1.0, 0.7, 2)),
      regime(RegimeKind::flr_const, trig_field(1.0, 1.0, 0.7, 0)),
      regime(RegimeKind::gc_variable, trig_field(1.0, 1.0, 0.7, 0)),
  };
  double worst = 0.0;
  std::string where;
  for (const auto& r : cases) {
    for (int k = 0; k <= r.max_order(); ++k) {
      const CrosscheckReport c = crosscheck(r, k, 50, 1000 + k);
      if (c.max_rel() >= worst) {
        worst = c.max_rel();
        where = std::string(to_string(r.kind)) + " k=" + std::to_string(k);
      }
    }
  }
  report(5, worst < 1e-5, "cross-check, 9 (regime, k) pairs x 50 states: max rel deviation " + fmt("%.2e", worst) +
                              " at " + where + " (want < 1e-5)");
}

void criterion6() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ph(0.0, kTwoPi);
  const Mat3 P = projector_P();
  double rot = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double th = 10.0 * u(rng);
    // int_0^theta R by two-point Gauss-Legendre on 4000 panels
    Mat3 acc = Mat3::Zero();
    const double g = 0.5 / std::sqrt(3.0);
    const int m = 4000;
    for (int i = 0; i < m; ++i) {
      const double a = th * i / m, h = th / m;
      acc += 0.5 * h * (rotation_R(a + h * (0.5 - g)) + rotation_R(a + h * (0.5 + g)));
    }
    rot = std::max(rot, (acc - th * P - rotation_calR(th)).norm());
    rot = std::max(rot, (rotation_calR(th) + rotation_R(kPi / 2 + th) - rotation_R(kPi / 2)).norm());
  }

  double endpoint = 0.0, derivative = 0.0, mean = 0.0;
  const std::vector<RegimeSpec> cases{regime(RegimeKind::gc_const, trig_field(1.0, 1.0, 0.7, 0)),
                                      regime(RegimeKind::irs_const, trig_field(1.0, 1.0, 0.7, 1))};
  for (const auto& r : cases) {
    const TwoScaleSystem sys = make_system(r);
    for (int k = 0; k <= 2; ++k) {
      for (int n = 0; n < 5; ++n) {
        StateStack st{0.5 + 0.5 * u(rng), {}};
        for (int j = 0; j <= k; ++j) {
          st.y.push_back(join(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))));
        }
        endpoint = std::max(endpoint, theta_A(sys, k, st, 0.0).norm());
        endpoint = std::max(endpoint, theta_A(sys, k, st, kTwoPi).norm());
        const Vec bar = abar_k(sys, k, st);
        const double th = 0.2 + (kTwoPi - 0.4) * (0.5 + 0.5 * u(rng));
        const double h = 1e-3;
        const Vec d = (8.0 * (theta_A(sys, k, st, th + h) - theta_A(sys, k, st, th - h)) -
                       (theta_A(sys, k, st, th + 2 * h) - theta_A(sys, k, st, th - 2 * h))) /
                      (12.0 * h);
        derivative = std::max(derivative, (d - (alpha_k(sys, k, st, th) - bar)).norm());
        const int nodes = 64;
        Vec acc = Vec::Zero(6);
        for (int l = 0; l < nodes; ++l) acc += alpha_k(sys, k, st, kTwoPi * l / nodes) - bar;
        mean = std::max(mean, (acc / nodes).norm());
      }
    }
  }
  const bool ok = rot < 1e-10 && endpoint < 1e-9 && derivative < 1e-6 && mean < 1e-9;
  report(6, ok,
         "structural identities: rotation integrals " + fmt("%.1e", rot) + ", thetaA at 0 and 2pi " +
             fmt("%.1e", endpoint) + ", d/dtheta thetaA - (alpha - abar) " + fmt("%.1e", derivative) +
             " (want < 1e-6), mean of alpha - abar " + fmt("%.1e", mean) + " (want < 1e-9)");
}

void criterion7() {
  const auto r = regime(RegimeKind::gc_const, constant_field(Vec3::Zero()));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0), dt(0.0, 1.0), ep(0.01, 0.5);
  const Vec3 w(0.7, -1.3, 0.4);
  const Density u0 = [&](const PhaseState& x) { return 0.25 + w.dot(pos(x)); };
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const PhaseState x = join(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)));
    const double s = 0.0, t = s + dt(rng), eps = ep(rng);
    PhaseState foot = x;
    foot(0) -= (t - s) * x(3);
    worst = std::max(worst, std::abs(transported_density(u0, r, 0, eps, t, s, x) - u0(foot)));
  }
  report(7, worst < 1e-8, "transported density vs free streaming, 20 samples: max error " + fmt("%.2e", worst) +
                              " (want < 1e-8)");
}

std::string without_runtime(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find("\"runtime_seconds\"") == std::string::npos) os << line << '\n';
  }
  return os.str();
}

void criterion8(const std::string& exe, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string conv = write(
      "converge.json",
      R"({"command":"converge","regime":"gc_const","orders":[0,1,2],"x0":[0,0,0],"v0":[1,0.5,0],"T":0.5,"samples":100,)"
      R"("field":{"preset":"trig"},"seed":5})");
  const std::string cross = write(
      "crosscheck.json",
      R"({"command":"crosscheck","regime":"irs_const","order":1,"seed":5,"crosscheck_samples":20,)"
      R"("field":{"preset":"resonant","modulation":0.2,"omega":0.5}})");
  bool ok = true;
  std::string detail;
  for (const auto& [cmd, cfg] : {std::pair{"converge", conv}, std::pair{"crosscheck", cross}}) {
    // same --out both times: the output path is echoed in the config block
    const std::string out = (dir / (std::string(cmd) + "_out.json")).string();
    const std::string line = "\"" + exe + "\" " + cmd + " --config \"" + cfg + "\" --out \"" + out + "\" --quiet";
    int status = std::system(line.c_str());
    const std::string first = without_runtime(out);
    status |= std::system(line.c_str());
    const bool same = status == 0 && !first.empty() && first == without_runtime(out);
    detail += std::string(cmd) + (same ? " identical" : " DIFFERS") + "; ";
    ok = ok && same;
  }
  report(8, ok, "determinism across two CLI runs: " + detail + "runtime field excluded");
}

template <class F>
void guarded(int id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <twoscale executable> <scratch directory>\n", argv[0]);
    return 2;
  }
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, [&] { criterion8(argv[1], argv[2]); });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
