#pragma once

// Epsilon sweeps against the reference solver, slope fits, and the
// generic-vs-closed-form cross-check.

#include "twoscale/integrate.hpp"
#include "twoscale/reconstruct.hpp"
#include "twoscale/regimes.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace twoscale {

/// max_i |a[i] - b[i]|. Throws DimensionError on a length or shape mismatch.
double sup_error(const Trajectory& a, const Trajectory& b);

/// Least-squares slope of log(err) against log(eps). Needs at least 4 pairs,
/// all positive (ConfigError otherwise).
double fit_slope(const std::vector<double>& eps, const std::vector<double>& err);

/// 2^-3 .. 2^-7.
std::vector<double> default_eps_list();

struct SweepOptions {
  std::vector<double> eps_list = default_eps_list();
  std::vector<int> orders{0};
  TimeGrid grid;
  /// Reference RK4 steps per 2 pi eps period.
  int osc_resolution = 50;
  /// A point counts only if its error exceeds this multiple of the
  /// reference error, estimated against a run at half the step.
  double floor_factor = 100.0;
  HierarchyOptions hierarchy;
  /// 0: TWOSCALE_THREADS, else hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct EpsFailure {
  double eps = 0.0;
  std::string message;
};

struct ConvergenceReport {
  std::string id;
  std::vector<int> orders;
  std::vector<double> eps_list;
  /// order -> error per eps (NaN where that eps failed).
  std::map<int, std::vector<double>> errors;
  /// order -> true where the point sits below the reference floor.
  std::map<int, std::vector<bool>> below_floor;
  /// Richardson estimate of the reference error per eps.
  std::vector<double> reference_error;
  /// order -> slope, absent when fewer than 4 usable points remain.
  std::map<int, std::optional<double>> slopes;
  std::vector<EpsFailure> failures;
  SweepOptions settings;
  double runtime_seconds = 0.0;

  /// Expected slope k + 1 within tol, using the fitted value.
  bool slope_within(int order, double tol) const;
};

ConvergenceReport run_convergence(const RegimeSpec& regime, const Vec& x0, const SweepOptions& opts);
ConvergenceReport run_convergence(const TwoScaleSystem& sys, const Vec& x0, const SweepOptions& opts);

/// Random states for cross-checks: positions and velocities uniform in
/// [-1, 1]^3; for gc_variable the position is redrawn with Omega in [0.5, 2].
struct CrosscheckBox {
  double coord = 1.0;
  double omega_min = 0.5, omega_max = 2.0;
  double t_min = 0.0, t_max = 1.0;

  std::string describe() const;
};

struct CrosscheckReport {
  std::string regime;
  int order = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string box;
  double rhs_abs = 0.0, rhs_rel = 0.0;
  double reconstruct_abs = 0.0, reconstruct_rel = 0.0;

  double max_rel() const { return std::max(rhs_rel, reconstruct_rel); }
};

/// Generic engine against the closed forms at `samples` seeded states. For
/// gc_variable at order 1 only the position block of the averaged field is
/// compared (against variable_Y1_position_rhs), plus the reconstruction.
CrosscheckReport crosscheck(const RegimeSpec& regime, int k, int samples, std::uint64_t seed,
                            const CrosscheckBox& box = {}, const AveragingOptions& opts = {});

/// Worker count: TWOSCALE_THREADS if set and positive, else hardware threads.
int resolve_threads(int requested);

}  // namespace twoscale
