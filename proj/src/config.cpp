#include "twoscale/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace twoscale {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::converge: return "converge";
    case Command::crosscheck: return "crosscheck";
    case Command::density: return "density";
  }
  return "unknown";
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config: '" + key + "' " + why);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      bad(where.empty() ? it.key() : where + "." + it.key(), "is not a recognised key");
    }
  }
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(key, "must be finite");
  return x;
}

double get_positive(const json& v, const std::string& key) {
  const double x = get_number(v, key);
  if (!(x > 0.0)) bad(key, "must be positive");
  return x;
}

long long get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad(key, "must be an integer");
  return v.get<long long>();
}

int get_int_at_least(const json& v, const std::string& key, long long lo) {
  const long long x = get_integer(v, key);
  if (x < lo || x > 1'000'000'000) bad(key, "must be an integer >= " + std::to_string(lo));
  return static_cast<int>(x);
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "must be a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& key, std::size_t n) {
  if (!v.is_array() || (n != 0 && v.size() != n)) {
    bad(key, n ? "must be an array of " + std::to_string(n) + " numbers" : "must be an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

Vec3 get_vec3(const json& v, const std::string& key) {
  const auto xs = get_numbers(v, key, 3);
  return Vec3(xs[0], xs[1], xs[2]);
}

FieldPreset parse_field(const json& v) {
  if (!v.is_object()) bad("field", "must be an object");
  FieldPreset f;
  if (!v.contains("preset")) bad("field.preset", "is required");
  f.name = get_string(v["preset"], "field.preset");
  static const std::map<std::string, std::set<std::string>> keys{
      {"zero", {}},
      {"constant", {"e"}},
      {"trig", {"amplitude", "wavenumber", "omega", "harmonic"}},
      {"transverse_sin", {"amplitude", "wavenumber", "omega"}},
      {"resonant", {"direction", "modulation", "omega", "phase"}},
  };
  const auto found = keys.find(f.name);
  if (found == keys.end()) bad("field.preset", "must be one of zero, constant, trig, transverse_sin, resonant");
  std::set<std::string> allowed = found->second;
  allowed.insert("preset");
  reject_unknown(v, "field", allowed);
  if (v.contains("e")) f.e = get_vec3(v["e"], "field.e");
  if (v.contains("direction")) f.direction = get_vec3(v["direction"], "field.direction");
  if (v.contains("amplitude")) f.amplitude = get_number(v["amplitude"], "field.amplitude");
  if (v.contains("wavenumber")) f.wavenumber = get_number(v["wavenumber"], "field.wavenumber");
  if (v.contains("omega")) f.omega = get_number(v["omega"], "field.omega");
  if (v.contains("harmonic")) {
    const long long h = get_integer(v["harmonic"], "field.harmonic");
    if (h < -64 || h > 64) bad("field.harmonic", "must be an integer in [-64, 64]");
    f.harmonic = static_cast<int>(h);
  }
  if (v.contains("modulation")) f.modulation = get_number(v["modulation"], "field.modulation");
  if (v.contains("phase")) f.phase = get_number(v["phase"], "field.phase");
  return f;
}

DensityPreset parse_density(const json& v) {
  if (!v.is_object()) bad("density", "must be an object");
  reject_unknown(v, "density", {"profile", "weights", "offset", "centre", "width", "t", "points"});
  DensityPreset d;
  if (v.contains("profile")) d.profile = get_string(v["profile"], "density.profile");
  if (d.profile != "linear" && d.profile != "gaussian") bad("density.profile", "must be linear or gaussian");
  if (v.contains("weights")) d.weights = get_numbers(v["weights"], "density.weights", 6);
  if (v.contains("offset")) d.offset = get_number(v["offset"], "density.offset");
  if (v.contains("centre")) d.centre = get_numbers(v["centre"], "density.centre", 6);
  if (v.contains("width")) d.width = get_positive(v["width"], "density.width");
  if (v.contains("t")) d.t = get_number(v["t"], "density.t");
  if (v.contains("points")) {
    const json& p = v["points"];
    if (!p.is_array()) bad("density.points", "must be an array of 6-vectors");
    for (std::size_t i = 0; i < p.size(); ++i) {
      d.points.push_back(get_numbers(p[i], "density.points[" + std::to_string(i) + "]", 6));
    }
  }
  return d;
}

}  // namespace

ElectricField FieldPreset::build() const {
  if (name == "zero") return constant_field(Vec3::Zero());
  if (name == "constant") return constant_field(e);
  if (name == "trig") return trig_field(amplitude, wavenumber, omega, harmonic);
  if (name == "transverse_sin") return transverse_sin_field(amplitude, wavenumber, omega);
  if (name == "resonant") return resonant_field(direction, modulation, omega, phase);
  throw ConfigError("config: unknown field preset '" + name + "'");
}

Density DensityPreset::build() const {
  if (profile == "linear") {
    Vec w(6);
    for (int i = 0; i < 6; ++i) w(i) = weights[i];
    const double c = offset;
    return [w, c](const PhaseState& x) { return c + w.dot(x); };
  }
  Vec c(6);
  for (int i = 0; i < 6; ++i) c(i) = centre[i];
  const double two_w2 = 2.0 * width * width;
  return [c, two_w2](const PhaseState& x) { return std::exp(-(x - c).squaredNorm() / two_w2); };
}

RegimeSpec RunConfig::regime_spec() const {
  RegimeSpec r;
  r.kind = regime;
  r.field = field.build();
  return r;
}

Vec RunConfig::initial_state() const { return join(x0, v0); }

TimeGrid RunConfig::grid() const { return TimeGrid{s, T, samples}; }

HierarchyOptions RunConfig::hierarchy_options() const {
  HierarchyOptions h;
  h.averaging.quad = quad;
  h.averaging.fd = fd;
  h.engine = engine;
  h.min_steps = min_steps;
  return h;
}

SweepOptions RunConfig::sweep_options() const {
  SweepOptions o;
  o.eps_list = eps_list;
  o.orders = orders;
  o.grid = grid();
  o.osc_resolution = osc_resolution;
  o.floor_factor = floor_factor;
  o.hierarchy = hierarchy_options();
  o.threads = threads;
  return o;
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["command"] = std::string(to_string(command));
  j["regime"] = std::string(to_string(regime));
  j["engine"] = engine == HierarchyEngine::closed_form ? "closed_form" : "generic";
  j["order"] = order;
  j["orders"] = orders;
  if (eps) j["eps"] = *eps;
  j["eps_list"] = eps_list;
  j["x0"] = {x0(0), x0(1), x0(2)};
  j["v0"] = {v0(0), v0(1), v0(2)};
  j["s"] = s;
  j["T"] = T;
  j["samples"] = samples;
  ordered_json f;
  f["preset"] = field.name;
  if (field.name == "constant") f["e"] = {field.e(0), field.e(1), field.e(2)};
  if (field.name == "trig" || field.name == "transverse_sin") {
    f["amplitude"] = field.amplitude;
    f["wavenumber"] = field.wavenumber;
    f["omega"] = field.omega;
  }
  if (field.name == "trig") f["harmonic"] = field.harmonic;
  if (field.name == "resonant") {
    f["direction"] = {field.direction(0), field.direction(1), field.direction(2)};
    f["modulation"] = field.modulation;
    f["omega"] = field.omega;
    f["phase"] = field.phase;
  }
  j["field"] = f;
  if (command == Command::density) {
    ordered_json d;
    d["profile"] = density.profile;
    if (density.profile == "linear") {
      d["weights"] = density.weights;
      d["offset"] = density.offset;
    } else {
      d["centre"] = density.centre;
      d["width"] = density.width;
    }
    d["t"] = density.t;
    d["points"] = density.points;
    j["density"] = d;
  }
  j["out"] = out;
  j["seed"] = seed;
  j["crosscheck_samples"] = crosscheck_samples;
  j["osc_resolution"] = osc_resolution;
  j["floor_factor"] = floor_factor;
  j["min_steps"] = min_steps;
  j["quadrature"] = {{"base_nodes", quad.base_nodes}, {"max_nodes", quad.max_nodes}, {"rel_tol", quad.rel_tol}};
  j["fd"] = {{"h1", fd.h1}, {"h2", fd.h2}};
  return j;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, "",
                 {"command", "regime", "engine", "order", "orders", "eps", "eps_list", "x0", "v0", "s", "T",
                  "samples", "field", "density", "out", "seed", "crosscheck_samples", "osc_resolution",
                  "floor_factor", "min_steps", "threads", "quadrature", "fd"});

  RunConfig c;
  if (!doc.contains("command")) bad("command", "is required");
  const std::string cmd = get_string(doc["command"], "command");
  if (cmd == "simulate") c.command = Command::simulate;
  else if (cmd == "converge") c.command = Command::converge;
  else if (cmd == "crosscheck") c.command = Command::crosscheck;
  else if (cmd == "density") c.command = Command::density;
  else bad("command", "must be one of simulate, converge, crosscheck, density");

  if (!doc.contains("regime")) bad("regime", "is required");
  const std::string reg = get_string(doc["regime"], "regime");
  const auto kind = parse_regime_kind(reg);
  if (!kind) bad("regime", "must be one of irs_const, gc_const, flr_const, gc_variable");
  c.regime = *kind;

  if (doc.contains("engine")) {
    const std::string e = get_string(doc["engine"], "engine");
    if (e == "closed_form") c.engine = HierarchyEngine::closed_form;
    else if (e == "generic") c.engine = HierarchyEngine::generic;
    else bad("engine", "must be closed_form or generic");
  }

  const int max = max_order(c.regime);
  auto check_order = [&](long long k, const std::string& key) {
    if (k < 0) bad(key, "must be non-negative");
    if (k > max) {
      bad(key, "= " + std::to_string(k) + " exceeds max_order " + std::to_string(max) + " of regime " + reg);
    }
    return static_cast<int>(k);
  };
  if (doc.contains("order")) c.order = check_order(get_integer(doc["order"], "order"), "order");
  if (doc.contains("orders")) {
    const json& o = doc["orders"];
    if (!o.is_array() || o.empty()) bad("orders", "must be a non-empty array of integers");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string key = "orders[" + std::to_string(i) + "]";
      c.orders.push_back(check_order(get_integer(o[i], key), key));
    }
  } else {
    for (int k = 0; k <= c.order; ++k) c.orders.push_back(k);
  }

  if (doc.contains("eps")) c.eps = get_positive(doc["eps"], "eps");
  if (doc.contains("eps_list")) {
    c.eps_list = get_numbers(doc["eps_list"], "eps_list", 0);
    if (c.eps_list.size() < 4) bad("eps_list", "needs at least 4 values");
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
      if (!(c.eps_list[i] > 0.0)) bad("eps_list", "values must be positive");
      if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) bad("eps_list", "must be strictly decreasing");
    }
  }
  if ((c.command == Command::simulate || c.command == Command::density) && !c.eps) {
    bad("eps", "is required for " + cmd);
  }

  if (doc.contains("x0")) c.x0 = get_vec3(doc["x0"], "x0");
  if (doc.contains("v0")) c.v0 = get_vec3(doc["v0"], "v0");
  if (doc.contains("s")) c.s = get_number(doc["s"], "s");
  if (doc.contains("T")) c.T = get_positive(doc["T"], "T");
  if (doc.contains("samples")) c.samples = get_int_at_least(doc["samples"], "samples", 2);
  if (doc.contains("field")) c.field = parse_field(doc["field"]);
  if (doc.contains("density")) c.density = parse_density(doc["density"]);
  if (doc.contains("out")) c.out = get_string(doc["out"], "out");
  if (doc.contains("seed")) {
    const long long sd = get_integer(doc["seed"], "seed");
    if (sd < 0) bad("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(sd);
  }
  if (doc.contains("crosscheck_samples")) {
    c.crosscheck_samples = get_int_at_least(doc["crosscheck_samples"], "crosscheck_samples", 1);
  }
  if (doc.contains("osc_resolution")) c.osc_resolution = get_int_at_least(doc["osc_resolution"], "osc_resolution", 4);
  if (doc.contains("floor_factor")) {
    c.floor_factor = get_number(doc["floor_factor"], "floor_factor");
    if (c.floor_factor < 0.0) bad("floor_factor", "must be non-negative");
  }
  if (doc.contains("min_steps")) c.min_steps = get_int_at_least(doc["min_steps"], "min_steps", 1);
  if (doc.contains("threads")) c.threads = get_int_at_least(doc["threads"], "threads", 0);
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    if (!q.is_object()) bad("quadrature", "must be an object");
    reject_unknown(q, "quadrature", {"base_nodes", "max_nodes", "rel_tol"});
    if (q.contains("base_nodes")) c.quad.base_nodes = get_int_at_least(q["base_nodes"], "quadrature.base_nodes", 4);
    if (q.contains("max_nodes")) c.quad.max_nodes = get_int_at_least(q["max_nodes"], "quadrature.max_nodes", 4);
    if (q.contains("rel_tol")) c.quad.rel_tol = get_positive(q["rel_tol"], "quadrature.rel_tol");
  }
  if (doc.contains("fd")) {
    const json& f = doc["fd"];
    if (!f.is_object()) bad("fd", "must be an object");
    reject_unknown(f, "fd", {"h1", "h2"});
    if (f.contains("h1")) c.fd.h1 = get_positive(f["h1"], "fd.h1");
    if (f.contains("h2")) c.fd.h2 = get_positive(f["h2"], "fd.h2");
  }

  try {
    c.quad.validate();
    c.fd.validate();
    c.regime_spec().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (c.regime == RegimeKind::gc_variable) {
    const VariableFieldGeometry geom;
    if (std::hypot(c.x0(0), c.x0(1)) < geom.r_min) {
      bad("x0", "lies on the axis of the variable field (Omega < " + std::to_string(geom.r_min) + ")");
    }
  }
  if (c.command == Command::density && c.density.points.empty()) bad("density.points", "must not be empty");
  return c;
}

void write_json(const ordered_json& doc, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << doc.dump(2) << '\n';
  if (!os) throw IoError("write to '" + path + "' failed");
}

void emit_trajectory_csv(const TrajectoryBundle& bundle, const std::string& path, const ordered_json& meta) {
  const std::size_t n = bundle.reference.size();
  for (const auto& [k, rec] : bundle.reconstruction) {
    if (rec.size() != n) throw DimensionError("emit_trajectory_csv: order " + std::to_string(k) + " is off-grid");
  }
  const int d = n ? static_cast<int>(bundle.reference[0].size()) : 0;
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::string header = "t";
  for (int i = 1; i <= d; ++i) header += ",ref_" + std::to_string(i);
  for (const auto& [k, rec] : bundle.reconstruction) {
    for (int i = 1; i <= d; ++i) header += ",rec" + std::to_string(k) + "_" + std::to_string(i);
    header += ",err" + std::to_string(k);
  }
  std::fprintf(f, "%s\n", header.c_str());
  for (std::size_t r = 0; r < n; ++r) {
    std::fprintf(f, "%.17g", bundle.grid.time(static_cast<int>(r)));
    for (int i = 0; i < d; ++i) std::fprintf(f, ",%.17g", bundle.reference[r](i));
    for (const auto& [k, rec] : bundle.reconstruction) {
      for (int i = 0; i < d; ++i) std::fprintf(f, ",%.17g", rec[r](i));
      std::fprintf(f, ",%.17g", (rec[r] - bundle.reference[r]).norm());
    }
    std::fprintf(f, "\n");
  }
  const bool ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw IoError("write to '" + path + "' failed");

  ordered_json m;
  m["version"] = kVersion;
  m["eps"] = bundle.eps;
  m["config"] = meta;
  write_json(m, path + ".meta.json");
}

ordered_json report_to_json(const ConvergenceReport& rep) {
  ordered_json j;
  j["id"] = rep.id;
  j["orders"] = rep.orders;
  j["eps_list"] = rep.eps_list;
  ordered_json errors = ordered_json::array();
  for (int k : rep.orders) {
    for (std::size_t e = 0; e < rep.eps_list.size(); ++e) {
      ordered_json row;
      row["order"] = k;
      row["eps"] = rep.eps_list[e];
      const double err = rep.errors.at(k)[e];
      row["error"] = std::isfinite(err) ? ordered_json(err) : ordered_json(nullptr);
      row["below_floor"] = static_cast<bool>(rep.below_floor.at(k)[e]);
      errors.push_back(row);
    }
  }
  j["errors"] = errors;
  ordered_json ref = ordered_json::array();
  for (double r : rep.reference_error) ref.push_back(std::isfinite(r) ? ordered_json(r) : ordered_json(nullptr));
  j["reference_error"] = ref;
  ordered_json slopes = ordered_json::object();
  for (int k : rep.orders) {
    const auto& sl = rep.slopes.at(k);
    slopes[std::to_string(k)] = sl ? ordered_json(*sl) : ordered_json(nullptr);
  }
  j["slopes"] = slopes;
  ordered_json fails = ordered_json::array();
  for (const auto& f : rep.failures) fails.push_back({{"eps", f.eps}, {"message", f.message}});
  j["failures"] = fails;
  const SweepOptions& o = rep.settings;
  j["reference_settings"] = {{"method", "rk4"},
                             {"osc_resolution", o.osc_resolution},
                             {"richardson", "same solver at half the step"},
                             {"floor_factor", o.floor_factor},
                             {"max_step", "min(T/1000, 2 pi eps / osc_resolution)"}};
  j["runtime_seconds"] = rep.runtime_seconds;
  return j;
}

ordered_json report_to_json(const CrosscheckReport& rep) {
  ordered_json j;
  j["regime"] = rep.regime;
  j["order"] = rep.order;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  j["box"] = rep.box;
  j["rhs_max_abs"] = rep.rhs_abs;
  j["rhs_max_rel"] = rep.rhs_rel;
  j["reconstruct_max_abs"] = rep.reconstruct_abs;
  j["reconstruct_max_rel"] = rep.reconstruct_rel;
  return j;
}

void emit_report_json(const ConvergenceReport& report, const std::string& path, const ordered_json& config) {
  ordered_json j = report_to_json(report);
  const double runtime = j["runtime_seconds"];
  j.erase("runtime_seconds");
  j["version"] = kVersion;
  j["config"] = config;
  j["runtime_seconds"] = runtime;
  write_json(j, path);
}

}  // namespace twoscale
