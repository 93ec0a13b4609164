#include "twoscale/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace twoscale {

double sup_error(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw DimensionError("sup_error: trajectories are on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) throw DimensionError("sup_error: state dimensions differ");
    m = std::max(m, (a[i] - b[i]).norm());
  }
  return m;
}

double fit_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size()) throw ConfigError("fit_slope: eps and error lists differ in length");
  if (eps.size() < 4) throw ConfigError("fit_slope: at least 4 points are needed");
  const std::size_t n = eps.size();
  double sx = 0, sy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0)) throw ConfigError("fit_slope: inputs must be positive");
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(err[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("fit_slope: eps values must not all coincide");
  return sxy / sxx;
}

std::vector<double> default_eps_list() {
  return {std::ldexp(1.0, -3), std::ldexp(1.0, -4), std::ldexp(1.0, -5), std::ldexp(1.0, -6),
          std::ldexp(1.0, -7)};
}

void SweepOptions::validate() const {
  grid.validate();
  if (eps_list.size() < 4) throw ConfigError("sweep: eps_list needs at least 4 values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw ConfigError("sweep: eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ConfigError("sweep: eps_list must be strictly decreasing");
  }
  if (orders.empty()) throw ConfigError("sweep: no orders requested");
  for (int k : orders) {
    if (k < 0) throw ConfigError("sweep: negative order");
  }
  if (osc_resolution < 4) throw ConfigError("sweep: osc_resolution must be at least 4");
  if (!(floor_factor >= 0.0)) throw ConfigError("sweep: floor_factor must be non-negative");
  if (hierarchy.min_steps < 1) throw ConfigError("sweep: min_steps must be positive");
  hierarchy.averaging.validate();
}

bool ConvergenceReport::slope_within(int order, double tol) const {
  const auto it = slopes.find(order);
  if (it == slopes.end() || !it->second) return false;
  return std::abs(*it->second - (order + 1)) <= tol;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TWOSCALE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results go into
/// caller-owned slots, so the outcome does not depend on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

using SumFn = std::function<PhaseState(int k, double eps, const StateStack& stack)>;

ConvergenceReport sweep(const std::string& id, const TwoScaleSystem& sys, const Vec& x0,
                        const SweepOptions& opts, const AveragedHierarchy& hierarchy, const SumFn& sum) {
  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport rep;
  rep.id = id;
  rep.orders = opts.orders;
  rep.eps_list = opts.eps_list;
  rep.settings = opts;
  const std::size_t n_eps = opts.eps_list.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k : opts.orders) {
    rep.errors[k].assign(n_eps, nan);
    rep.below_floor[k].assign(n_eps, false);
  }
  rep.reference_error.assign(n_eps, nan);

  std::vector<std::string> failure(n_eps);
  std::vector<std::vector<double>> errs(n_eps);
  const TimeGrid& grid = opts.grid;

  parallel_for(static_cast<int>(n_eps), resolve_threads(opts.threads), [&](int e) {
    const double eps = opts.eps_list[e];
    try {
      const Trajectory ref = solve_reference(sys, eps, x0, grid, opts.osc_resolution);
      const Trajectory fine = solve_reference(sys, eps, x0, grid, opts.osc_resolution, 2);
      rep.reference_error[e] = sup_error(ref, fine);
      std::vector<double> row;
      for (int k : opts.orders) {
        double m = 0.0;
        for (int i = 0; i < grid.samples; ++i) {
          m = std::max(m, (sum(k, eps, hierarchy.stack_at(i)) - ref[i]).norm());
        }
        row.push_back(m);
      }
      errs[e] = std::move(row);
    } catch (const std::exception& ex) {
      failure[e] = ex.what();
    }
  });

  for (std::size_t e = 0; e < n_eps; ++e) {
    if (!failure[e].empty()) {
      rep.failures.push_back({opts.eps_list[e], failure[e]});
      continue;
    }
    for (std::size_t j = 0; j < opts.orders.size(); ++j) {
      const int k = opts.orders[j];
      rep.errors[k][e] = errs[e][j];
      rep.below_floor[k][e] = !(errs[e][j] > opts.floor_factor * rep.reference_error[e]);
    }
  }

  for (int k : opts.orders) {
    std::vector<double> xs, ys;
    for (std::size_t e = 0; e < n_eps; ++e) {
      const double err = rep.errors[k][e];
      if (std::isfinite(err) && err > 0.0 && !rep.below_floor[k][e]) {
        xs.push_back(opts.eps_list[e]);
        ys.push_back(err);
      }
    }
    rep.slopes[k] = xs.size() >= 4 ? std::optional<double>(fit_slope(xs, ys)) : std::nullopt;
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

int highest(const std::vector<int>& orders) { return *std::max_element(orders.begin(), orders.end()); }

}  // namespace

ConvergenceReport run_convergence(const RegimeSpec& regime, const Vec& x0, const SweepOptions& opts) {
  opts.validate();
  regime.validate();
  const int kmax = highest(opts.orders);
  if (kmax > regime.max_order()) {
    throw ConfigError("run_convergence: order " + std::to_string(kmax) + " exceeds max_order " +
                      std::to_string(regime.max_order()) + " of " + std::string(to_string(regime.kind)));
  }
  if (x0.size() != 6) throw DimensionError("run_convergence: regime states have dimension 6");
  const TwoScaleSystem sys = make_system(regime);
  const AveragedHierarchy h = solve_hierarchy(regime, kmax, x0, opts.grid, opts.hierarchy);
  const double s = opts.grid.s;
  const AveragingOptions& av = opts.hierarchy.averaging;
  // gc_variable has no closed-form profile above order 1 and its order-1
  // averaged fields are generic, so the regime path covers every supported pair.
  return sweep(std::string(to_string(regime.kind)), sys, x0, opts, h,
               [&](int k, double eps, const StateStack& st) {
                 return expansion_sum(regime, k, eps, s, st.truncated(k), av);
               });
}

ConvergenceReport run_convergence(const TwoScaleSystem& sys, const Vec& x0, const SweepOptions& opts) {
  opts.validate();
  const int kmax = highest(opts.orders);
  if (kmax > kMaxAveragingOrder) {
    throw ConfigError("run_convergence: order " + std::to_string(kmax) + " exceeds max_order " +
                      std::to_string(kMaxAveragingOrder));
  }
  if (x0.size() != sys.dim) throw DimensionError("run_convergence: x0 does not match the system");
  const AveragedHierarchy h = solve_hierarchy(sys, kmax, x0, opts.grid, opts.hierarchy);
  const double s = opts.grid.s;
  const AveragingOptions& av = opts.hierarchy.averaging;
  return sweep(sys.name.empty() ? "generic" : sys.name, sys, x0, opts, h,
               [&](int k, double eps, const StateStack& st) {
                 return expansion_sum(sys, k, eps, s, st.truncated(k), av);
               });
}

std::string CrosscheckBox::describe() const {
  std::ostringstream os;
  os << "positions in [-" << coord << "," << coord << "]^3 (gc_variable: Omega in [" << omega_min << ","
     << omega_max << "]), velocities in [-" << coord << "," << coord << "]^3, t in [" << t_min << ","
     << t_max << "], theta in [0,2pi)";
  return os.str();
}

CrosscheckReport crosscheck(const RegimeSpec& regime, int k, int samples, std::uint64_t seed,
                            const CrosscheckBox& box, const AveragingOptions& opts) {
  regime.validate();
  const bool variable = regime.kind == RegimeKind::gc_variable;
  if (k < 0 || k > regime.max_order()) {
    throw ConfigError("crosscheck: order " + std::to_string(k) + " exceeds max_order " +
                      std::to_string(regime.max_order()) + " of " + std::string(to_string(regime.kind)));
  }
  if (samples < 1) throw ConfigError("crosscheck: samples must be positive");

  CrosscheckReport rep;
  rep.regime = std::string(to_string(regime.kind));
  rep.order = k;
  rep.samples = samples;
  rep.seed = seed;
  rep.box = box.describe();

  const TwoScaleSystem sys = make_system(regime);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto coord = [&] { return box.coord * (2.0 * unit(rng) - 1.0); };
  auto draw = [&] {
    Vec v(6);
    for (int i = 0; i < 6; ++i) v(i) = coord();
    return v;
  };

  for (int n = 0; n < samples; ++n) {
    StateStack st;
    st.t = box.t_min + (box.t_max - box.t_min) * unit(rng);
    for (int j = 0; j <= k; ++j) st.y.push_back(draw());
    if (variable) {
      const double r = box.omega_min + (box.omega_max - box.omega_min) * unit(rng);
      const double phi = kTwoPi * unit(rng);
      st.y[0](0) = r * std::cos(phi);
      st.y[0](1) = r * std::sin(phi);
    }
    const double theta = kTwoPi * unit(rng);

    Vec closed, generic;
    if (variable && k == 1) {
      const Vec3 y0 = pos(st.y[0]);
      closed = variable_Y1_position_rhs(y0, vel(st.y[0]), pos(st.y[1]), vel(st.y[1]), regime.field(st.t, 0.0, y0),
                                        regime.geometry);
      generic = abar_k(sys, 1, st, opts).head<3>();
    } else {
      closed = regime_rhs(regime, k, st, opts.quad);
      generic = abar_all(sys, st, opts);
    }
    rep.rhs_abs = std::max(rep.rhs_abs, (closed - generic).norm());
    rep.rhs_rel = std::max(rep.rhs_rel, relative_deviation(generic, closed));

    const Vec xc = regime_reconstruct(regime, k, theta, st, opts);
    const Vec xg = reconstruct_X(sys, k, theta, st, opts);
    rep.reconstruct_abs = std::max(rep.reconstruct_abs, (xc - xg).norm());
    rep.reconstruct_rel = std::max(rep.reconstruct_rel, relative_deviation(xg, xc));
  }
  return rep;
}

}  // namespace twoscale
