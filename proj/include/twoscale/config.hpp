#pragma once

// Run configuration for the command-line front end, and the CSV / JSON
// writers it uses.

#include "twoscale/harness.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twoscale {

enum class Command { simulate, converge, crosscheck, density };

std::string_view to_string(Command c);

/// Named built-in field with its numeric parameters.
///   zero
///   constant        e: [3]
///   trig            amplitude, wavenumber, omega, harmonic
///   transverse_sin  amplitude, wavenumber, omega
///   resonant        direction: [3], modulation, omega, phase
struct FieldPreset {
  std::string name = "zero";
  Vec3 e = Vec3::Zero();
  Vec3 direction = Vec3(0.0, 1.0, 0.0);
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double omega = 0.0;
  int harmonic = 0;
  double modulation = 0.0;
  double phase = 0.0;

  ElectricField build() const;
};

/// Initial density for the density command: u0(x, v) = offset + w . (x, v)
/// ("linear") or exp(-|(x, v) - centre|^2 / (2 width^2)) ("gaussian").
struct DensityPreset {
  std::string profile = "linear";
  std::vector<double> weights = std::vector<double>(6, 0.0);
  double offset = 0.0;
  std::vector<double> centre = std::vector<double>(6, 0.0);
  double width = 1.0;
  /// Evaluation time and phase-space points.
  double t = 1.0;
  std::vector<std::vector<double>> points;

  Density build() const;
};

struct RunConfig {
  Command command = Command::simulate;
  RegimeKind regime = RegimeKind::gc_const;
  HierarchyEngine engine = HierarchyEngine::closed_form;
  int order = 0;
  std::vector<int> orders;
  std::optional<double> eps;
  std::vector<double> eps_list = default_eps_list();
  Vec3 x0 = Vec3::Zero();
  Vec3 v0 = Vec3::Zero();
  double s = 0.0;
  double T = 1.0;
  int samples = 400;
  FieldPreset field;
  DensityPreset density;
  std::string out;
  std::uint64_t seed = 0;
  int crosscheck_samples = 50;
  int osc_resolution = 50;
  double floor_factor = 100.0;
  int min_steps = 2000;
  int threads = 0;
  QuadratureConfig quad;
  FDConfig fd;

  RegimeSpec regime_spec() const;
  Vec initial_state() const;
  TimeGrid grid() const;
  HierarchyOptions hierarchy_options() const;
  SweepOptions sweep_options() const;
  /// Every resolved setting, defaults included. Excludes `threads`, which
  /// does not affect results.
  nlohmann::ordered_json to_json() const;
};

/// Parses and validates a JSON document. Throws ConfigError naming the
/// offending key or value.
RunConfig parse_config(const std::string& text);

/// Header t, ref_1..ref_d, then rec{k}_1..rec{k}_d, err{k} per order; one row
/// per grid time, %.17g. Writes `<path>.meta.json` next to it.
void emit_trajectory_csv(const TrajectoryBundle& bundle, const std::string& path,
                         const nlohmann::ordered_json& meta);

nlohmann::ordered_json report_to_json(const ConvergenceReport& report);
nlohmann::ordered_json report_to_json(const CrosscheckReport& report);

/// Writes the document with a trailing newline; IoError on failure.
void write_json(const nlohmann::ordered_json& doc, const std::string& path);

void emit_report_json(const ConvergenceReport& report, const std::string& path,
                      const nlohmann::ordered_json& config);

}  // namespace twoscale
