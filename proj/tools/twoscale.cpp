// twoscale: simulate | converge | crosscheck | density
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 I/O error.

#include "twoscale/config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace twoscale;
using nlohmann::ordered_json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Fills in the command from the subcommand, or checks they agree.
RunConfig load(const Flags& flags, Command cmd) {
  const std::string text = read_file(flags.config);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  const std::string name(to_string(cmd));
  if (doc.is_object() && !doc.contains("command")) doc["command"] = name;
  if (doc.is_object() && doc["command"].is_string() && doc["command"] != name) {
    throw ConfigError("config: 'command' is " + doc["command"].get<std::string>() + " but the subcommand is " + name);
  }
  RunConfig c = parse_config(doc.dump());
  if (!flags.out.empty()) c.out = flags.out;
  if (c.out.empty()) c.out = "twoscale_" + name + (cmd == Command::converge || cmd == Command::crosscheck ? ".json" : ".csv");
  return c;
}

void run_simulate(const RunConfig& c, bool quiet) {
  const RegimeSpec regime = c.regime_spec();
  const TwoScaleSystem sys = make_system(regime);
  const TimeGrid grid = c.grid();
  const Vec x0 = c.initial_state();
  const double eps = *c.eps;
  const HierarchyOptions h = c.hierarchy_options();
  int kmax = 0;
  for (int k : c.orders) kmax = std::max(kmax, k);

  TrajectoryBundle bundle;
  bundle.grid = grid;
  bundle.eps = eps;
  bundle.reference = solve_reference(sys, eps, x0, grid, c.osc_resolution);
  const AveragedHierarchy hier = solve_hierarchy(regime, kmax, x0, grid, h);
  for (int k : c.orders) {
    Trajectory rec;
    rec.reserve(grid.samples);
    for (int i = 0; i < grid.samples; ++i) {
      rec.push_back(expansion_sum(regime, k, eps, grid.s, hier.stack_at(i).truncated(k), h.averaging));
    }
    bundle.reconstruction[k] = std::move(rec);
  }
  emit_trajectory_csv(bundle, c.out, c.to_json());
  if (!quiet) {
    for (const auto& [k, rec] : bundle.reconstruction) {
      std::printf("order %d  sup error %.6e\n", k, sup_error(bundle.reference, rec));
    }
    std::printf("wrote %s\n", c.out.c_str());
  }
}

void run_converge(const RunConfig& c, bool quiet) {
  const ConvergenceReport rep = run_convergence(c.regime_spec(), c.initial_state(), c.sweep_options());
  emit_report_json(rep, c.out, c.to_json());
  if (!quiet) {
    for (int k : rep.orders) {
      const auto& sl = rep.slopes.at(k);
      if (sl) std::printf("order %d  slope %.4f (expected %d)\n", k, *sl, k + 1);
      else std::printf("order %d  slope undefined (fewer than 4 points above the reference floor)\n", k);
    }
    for (const auto& f : rep.failures) std::printf("eps %.6g failed: %s\n", f.eps, f.message.c_str());
    std::printf("wrote %s\n", c.out.c_str());
  }
}

void run_crosscheck(const RunConfig& c, bool quiet) {
  const auto start = std::chrono::steady_clock::now();
  const RegimeSpec regime = c.regime_spec();
  AveragingOptions opts;
  opts.quad = c.quad;
  opts.fd = c.fd;
  ordered_json reports = ordered_json::array();
  for (int k : c.orders) {
    const CrosscheckReport rep = crosscheck(regime, k, c.crosscheck_samples, c.seed, {}, opts);
    reports.push_back(report_to_json(rep));
    if (!quiet) {
      std::printf("order %d  rhs max rel %.3e  reconstruct max rel %.3e\n", k, rep.rhs_rel, rep.reconstruct_rel);
    }
  }
  ordered_json j;
  j["reports"] = reports;
  j["version"] = kVersion;
  j["config"] = c.to_json();
  j["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(j, c.out);
  if (!quiet) std::printf("wrote %s\n", c.out.c_str());
}

void run_density(const RunConfig& c, bool quiet) {
  const RegimeSpec regime = c.regime_spec();
  const Density u0 = c.density.build();
  const HierarchyOptions h = c.hierarchy_options();
  std::FILE* f = std::fopen(c.out.c_str(), "wb");
  if (!f) throw IoError("cannot open '" + c.out + "' for writing");
  std::fprintf(f, "x_1,x_2,x_3,v_1,v_2,v_3,u\n");
  for (const auto& p : c.density.points) {
    PhaseState x(6);
    for (int i = 0; i < 6; ++i) x(i) = p[i];
    const double u = transported_density(u0, regime, c.order, *c.eps, c.density.t, c.s, x, h);
    for (int i = 0; i < 6; ++i) std::fprintf(f, "%.17g,", x(i));
    std::fprintf(f, "%.17g\n", u);
  }
  const bool ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw IoError("write to '" + c.out + "' failed");
  ordered_json m;
  m["version"] = kVersion;
  m["config"] = c.to_json();
  write_json(m, c.out + ".meta.json");
  if (!quiet) std::printf("wrote %s (%zu points)\n", c.out.c_str(), c.density.points.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-scale expansions of oscillatory singularly perturbed ODEs"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Flags flags;
  struct Sub {
    Command cmd;
    const char* help;
    CLI::App* app = nullptr;
  };
  std::vector<Sub> subs{{Command::simulate, "Reference and reconstructed trajectories to CSV"},
                        {Command::converge, "Epsilon sweep with slope fits to JSON"},
                        {Command::crosscheck, "Generic engine against closed forms to JSON"},
                        {Command::density, "Transported density at given points to CSV"}};
  for (auto& s : subs) {
    s.app = app.add_subcommand(std::string(to_string(s.cmd)), s.help);
    s.app->add_option("--config", flags.config, "JSON run configuration")->required();
    s.app->add_option("--out", flags.out, "Output path (overrides the config)");
    s.app->add_flag("--quiet", flags.quiet, "No summary on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& s : subs) {
      if (!s.app->parsed()) continue;
      const RunConfig c = load(flags, s.cmd);
      switch (s.cmd) {
        case Command::simulate: run_simulate(c, flags.quiet); break;
        case Command::converge: run_converge(c, flags.quiet); break;
        case Command::crosscheck: run_crosscheck(c, flags.quiet); break;
        case Command::density: run_density(c, flags.quiet); break;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
