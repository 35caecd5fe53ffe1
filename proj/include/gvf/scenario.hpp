// Scenario configuration: JSON schema, validation, and path construction.
//
// A scenario file describes one simulation: the trajectory (builtin name,
// inline DSL source, or a path file), guidance mode and gains, wind, actuator
// limits, the vehicles' initial states, optional coordination (comm graph +
// bus), and run length / step / seed.  Validation is strict: unknown keys are
// rejected and every error names the offending field.  See README for the
// full schema.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gvf/coordination.hpp"
#include "gvf/errors.hpp"
#include "gvf/gvf_implicit.hpp"
#include "gvf/gvf_parametric.hpp"
#include "gvf/path_dsl.hpp"
#include "gvf/path_library.hpp"
#include "gvf/vehicle.hpp"

namespace gvf {

enum class GuidanceMode { kGvf, kPgvf };

inline const char* to_string(GuidanceMode m) {
  return m == GuidanceMode::kGvf ? "gvf" : "pgvf";
}

struct TrajectoryConfig {
  // Exactly one of the three sources is set.
  std::string builtin;
  std::vector<double> builtin_params;
  std::vector<std::string> dsl_exprs;  // 1 expression: implicit; 2-3: parametric
  Bindings dsl_params;
  std::string file;

  bool is_builtin() const { return !builtin.empty(); }
  bool is_dsl() const { return !dsl_exprs.empty(); }
  bool is_file() const { return !file.empty(); }
};

struct VehicleConfig {
  Vec3 position{0.0, 0.0, 50.0};
  double heading = 0.0;
  double airspeed = 11.0;
  double w = 0.0;
};

struct CoordinationConfig {
  double kc = 0.05;
  double e_max = 1000.0;  // clamp on the level-set offset (gvf formations only)
  CommGraph graph;
  BusConfig bus;
};

struct ScenarioConfig {
  std::string name;
  GuidanceMode mode = GuidanceMode::kGvf;
  TrajectoryConfig trajectory;
  GvfGains gvf_gains;
  PGvfGains pgvf_gains;
  std::vector<GvfGains> vehicle_gvf_gains;    // resolved per vehicle (gvf mode)
  std::vector<PGvfGains> vehicle_pgvf_gains;  // resolved per vehicle (pgvf mode)
  WindModel wind;
  double roll_max = 0.75;
  double vz_max = 3.0;
  double vz_time_constant = 1.0;
  std::vector<VehicleConfig> vehicles;
  std::optional<CoordinationConfig> coordination;
  double duration = 60.0;
  double dt = 0.02;
  std::uint64_t seed = 0;
  double convergence_threshold = 10.0;  // [m], for the convergence-time metric

  ActuatorLimits limits_for(const VehicleConfig& v) const {
    return ActuatorLimits::for_airspeed(v.airspeed, roll_max, vz_max, vz_time_constant);
  }
};

// Build the path described by the trajectory config.  `base_dir` resolves
// relative path-file references.
inline PathSpec build_path(const TrajectoryConfig& t, const std::string& base_dir = ".") {
  if (t.is_builtin()) return make_trajectory(t.builtin, t.builtin_params);
  if (t.is_dsl()) {
    if (t.dsl_exprs.size() == 1) return compile_implicit_path(t.dsl_exprs[0], t.dsl_params);
    return compile_parametric_path(t.dsl_exprs, t.dsl_params);
  }
  std::string file = t.file;
  if (!file.empty() && file[0] != '/') file = base_dir + "/" + file;
  return load_path_file(file);
}

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

inline const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

inline double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError(what + " must be a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const std::string& where, const char* key,
                        double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return as_number(*it, where + "." + key);
}

inline Vec2 as_vec2(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2)
    throw ValidationError(what + " must be an array of 2 numbers");
  return {as_number(v[0], what + "[0]"), as_number(v[1], what + "[1]")};
}

inline Vec3 as_vec3(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3)
    throw ValidationError(what + " must be an array of 3 numbers");
  return {as_number(v[0], what + "[0]"), as_number(v[1], what + "[1]"),
          as_number(v[2], what + "[2]")};
}

inline TrajectoryConfig parse_trajectory(const json& j) {
  check_keys(j, "trajectory", {"builtin", "params", "dsl", "file"});
  TrajectoryConfig t;
  const int sources = (j.contains("builtin") ? 1 : 0) + (j.contains("dsl") ? 1 : 0) +
                      (j.contains("file") ? 1 : 0);
  if (sources != 1)
    throw ValidationError("trajectory needs exactly one of 'builtin', 'dsl', 'file'");
  if (j.contains("builtin")) {
    t.builtin = require(j, "trajectory", "builtin").get<std::string>();
    const json& params = require(j, "trajectory", "params");
    if (!params.is_array()) throw ValidationError("trajectory.params must be an array");
    for (std::size_t i = 0; i < params.size(); ++i)
      t.builtin_params.push_back(
          as_number(params[i], "trajectory.params[" + std::to_string(i) + "]"));
  } else if (j.contains("dsl")) {
    const json& dsl = j["dsl"];
    check_keys(dsl, "trajectory.dsl", {"implicit", "parametric", "params"});
    if (dsl.contains("implicit") == dsl.contains("parametric"))
      throw ValidationError("trajectory.dsl needs exactly one of 'implicit', 'parametric'");
    if (dsl.contains("implicit")) {
      t.dsl_exprs.push_back(dsl["implicit"].get<std::string>());
    } else {
      const json& coords = dsl["parametric"];
      if (!coords.is_array() || coords.size() < 2 || coords.size() > 3)
        throw ValidationError("trajectory.dsl.parametric must list 2 or 3 expressions");
      for (const auto& c : coords) t.dsl_exprs.push_back(c.get<std::string>());
    }
    if (dsl.contains("params")) {
      if (!dsl["params"].is_object())
        throw ValidationError("trajectory.dsl.params must be an object");
      for (const auto& [key, value] : dsl["params"].items())
        t.dsl_params[key] = as_number(value, "trajectory.dsl.params." + key);
    }
  } else {
    t.file = j["file"].get<std::string>();
    if (j.contains("params")) throw ValidationError("trajectory.params is only for builtins");
  }
  return t;
}

inline GvfGains parse_gvf_gains(const json& j, const std::string& where, GvfGains base) {
  check_keys(j, where, {"ke", "kn", "s"});
  base.ke = number_or(j, where, "ke", base.ke);
  base.kn = number_or(j, where, "kn", base.kn);
  base.s = static_cast<int>(number_or(j, where, "s", base.s));
  base.validate();
  return base;
}

inline PGvfGains parse_pgvf_gains(const json& j, const std::string& where, PGvfGains base) {
  check_keys(j, where, {"kx", "ky", "kz", "kn", "beta", "s"});
  base.kx = number_or(j, where, "kx", base.kx);
  base.ky = number_or(j, where, "ky", base.ky);
  base.kz = number_or(j, where, "kz", base.kz);
  base.kn = number_or(j, where, "kn", base.kn);
  base.beta = number_or(j, where, "beta", base.beta);
  base.s = static_cast<int>(number_or(j, where, "s", base.s));
  base.validate();
  return base;
}

inline GuidanceMode infer_mode(const TrajectoryConfig& t, const std::string& base_dir) {
  if (t.is_builtin()) {
    if (t.builtin == "circle" || t.builtin == "ellipse") return GuidanceMode::kGvf;
    return GuidanceMode::kPgvf;
  }
  if (t.is_dsl()) return t.dsl_exprs.size() == 1 ? GuidanceMode::kGvf : GuidanceMode::kPgvf;
  // Path file: count its expressions.
  std::string file = t.file;
  if (!file.empty() && file[0] != '/') file = base_dir + "/" + file;
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open path file '" + file + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const PathFile parsed = parse_path_file_text(text.str(), file);
  return parsed.expressions.size() == 1 ? GuidanceMode::kGvf : GuidanceMode::kPgvf;
}

}  // namespace detail

// Parse and validate a scenario from JSON text.  `base_dir` resolves relative
// path-file references.  `seed_override` replaces the scenario seed and any
// explicit wind/bus seeds, so one flag reseeds the whole run.
inline ScenarioConfig load_scenario_text(const std::string& text, const std::string& base_dir = ".",
                                         std::optional<std::uint64_t> seed_override = {}) {
  using detail::check_keys;
  using detail::number_or;
  using detail::require;
  using json = nlohmann::json;

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
  check_keys(j, "scenario",
             {"name", "mode", "trajectory", "gains", "wind", "limits", "vehicles", "coordination",
              "duration", "dt", "seed", "metrics"});

  ScenarioConfig cfg;
  if (j.contains("name")) cfg.name = j["name"].get<std::string>();
  cfg.trajectory = detail::parse_trajectory(require(j, "scenario", "trajectory"));

  cfg.seed = static_cast<std::uint64_t>(number_or(j, "scenario", "seed", 0.0));
  if (seed_override) cfg.seed = *seed_override;

  const GuidanceMode inferred = detail::infer_mode(cfg.trajectory, base_dir);
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode != "gvf" && mode != "pgvf")
      throw ValidationError("mode must be 'gvf' or 'pgvf', got '" + mode + "'");
    cfg.mode = mode == "gvf" ? GuidanceMode::kGvf : GuidanceMode::kPgvf;
    if (cfg.mode != inferred)
      throw ValidationError(std::string("mode '") + mode + "' does not match the trajectory (" +
                            (inferred == GuidanceMode::kGvf ? "implicit" : "parametric") + ")");
  } else {
    cfg.mode = inferred;
  }

  if (j.contains("gains")) {
    if (cfg.mode == GuidanceMode::kGvf)
      cfg.gvf_gains = detail::parse_gvf_gains(j["gains"], "gains", cfg.gvf_gains);
    else
      cfg.pgvf_gains = detail::parse_pgvf_gains(j["gains"], "gains", cfg.pgvf_gains);
  }

  // Wind; its gust seed defaults to the scenario seed.
  {
    Vec2 mean{0.0, 0.0};
    double amp = 0.0, period = 1.0;
    std::uint64_t wind_seed = cfg.seed;
    if (j.contains("wind")) {
      const json& w = j["wind"];
      check_keys(w, "wind", {"mean", "gust_amplitude", "gust_period", "seed"});
      if (w.contains("mean")) mean = detail::as_vec2(w["mean"], "wind.mean");
      amp = number_or(w, "wind", "gust_amplitude", 0.0);
      period = number_or(w, "wind", "gust_period", 1.0);
      if (w.contains("seed") && !seed_override)
        wind_seed = static_cast<std::uint64_t>(detail::as_number(w["seed"], "wind.seed"));
    }
    cfg.wind = WindModel::make(mean, amp, period, wind_seed);
  }

  if (j.contains("limits")) {
    const json& l = j["limits"];
    check_keys(l, "limits", {"roll_max", "vz_max", "vz_time_constant"});
    cfg.roll_max = number_or(l, "limits", "roll_max", cfg.roll_max);
    cfg.vz_max = number_or(l, "limits", "vz_max", cfg.vz_max);
    cfg.vz_time_constant = number_or(l, "limits", "vz_time_constant", cfg.vz_time_constant);
  }

  const json& vehicles = require(j, "scenario", "vehicles");
  if (!vehicles.is_array() || vehicles.empty())
    throw ValidationError("vehicles must be a nonempty array");
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const json& v = vehicles[i];
    const std::string where = "vehicles[" + std::to_string(i) + "]";
    check_keys(v, where, {"position", "heading", "airspeed", "w", "gains"});
    VehicleConfig vc;
    if (v.contains("position")) vc.position = detail::as_vec3(v["position"], where + ".position");
    vc.heading = wrap_to_pi(number_or(v, where, "heading", 0.0));
    vc.airspeed = number_or(v, where, "airspeed", 11.0);
    if (vc.airspeed <= 0.0) throw ValidationError(where + ".airspeed must be positive");
    vc.w = number_or(v, where, "w", 0.0);
    cfg.vehicles.push_back(vc);
    if (cfg.mode == GuidanceMode::kGvf)
      cfg.vehicle_gvf_gains.push_back(
          v.contains("gains") ? detail::parse_gvf_gains(v["gains"], where + ".gains", cfg.gvf_gains)
                              : cfg.gvf_gains);
    else
      cfg.vehicle_pgvf_gains.push_back(v.contains("gains") ? detail::parse_pgvf_gains(
                                                                 v["gains"], where + ".gains",
                                                                 cfg.pgvf_gains)
                                                           : cfg.pgvf_gains);
  }
  // Coordination laws assume one direction gain for the whole formation.
  if (cfg.mode == GuidanceMode::kGvf)
    for (const auto& g : cfg.vehicle_gvf_gains)
      if (g.s != cfg.vehicle_gvf_gains[0].s)
        throw ValidationError("all vehicles must share the same direction gain s");

  cfg.duration = number_or(j, "scenario", "duration", cfg.duration);
  if (cfg.duration <= 0.0) throw ValidationError("duration must be positive");
  cfg.dt = number_or(j, "scenario", "dt", cfg.dt);
  if (!(cfg.dt > 0.0) || cfg.dt > 0.1)
    throw ValidationError("dt must be in (0, 0.1], got " + std::to_string(cfg.dt));

  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    check_keys(m, "metrics", {"convergence_threshold"});
    cfg.convergence_threshold =
        number_or(m, "metrics", "convergence_threshold", cfg.convergence_threshold);
    if (cfg.convergence_threshold <= 0.0)
      throw ValidationError("metrics.convergence_threshold must be positive");
  }

  if (j.contains("coordination")) {
    const json& c = j["coordination"];
    check_keys(c, "coordination", {"kc", "e_max", "edges", "bus"});
    if (cfg.vehicles.size() < 2)
      throw ValidationError("coordination needs at least 2 vehicles");
    CoordinationConfig coord;
    coord.kc = number_or(c, "coordination", "kc", coord.kc);
    if (coord.kc <= 0.0) throw ValidationError("coordination.kc must be positive");
    if (c.contains("e_max")) {
      if (cfg.mode != GuidanceMode::kGvf)
        throw ValidationError("coordination.e_max only applies to gvf formations");
      coord.e_max = detail::as_number(c["e_max"], "coordination.e_max");
      if (coord.e_max <= 0.0) throw ValidationError("coordination.e_max must be positive");
    }
    coord.graph.count = static_cast<int>(cfg.vehicles.size());
    const json& edges = require(c, "coordination", "edges");
    if (!edges.is_array() || edges.empty())
      throw ValidationError("coordination.edges must be a nonempty array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const json& e = edges[i];
      const std::string where = "coordination.edges[" + std::to_string(i) + "]";
      check_keys(e, where, {"a", "b", "offset"});
      CommEdge edge;
      edge.a = static_cast<int>(detail::as_number(require(e, where, "a"), where + ".a"));
      edge.b = static_cast<int>(detail::as_number(require(e, where, "b"), where + ".b"));
      edge.offset = number_or(e, where, "offset", 0.0);
      coord.graph.edges.push_back(edge);
    }
    coord.graph.validate(/*wrap_offsets=*/cfg.mode == GuidanceMode::kGvf);
    // Circle-phase coordination needs a center to measure phases about; only
    // the builtin circle provides one.
    if (cfg.mode == GuidanceMode::kGvf &&
        (!cfg.trajectory.is_builtin() || cfg.trajectory.builtin != "circle"))
      throw ValidationError(
          "gvf coordination is only supported on the builtin circle trajectory");
    if (c.contains("bus")) {
      const json& b = c["bus"];
      check_keys(b, "coordination.bus", {"period", "delay", "drop_probability", "seed"});
      coord.bus.period = number_or(b, "coordination.bus", "period", coord.bus.period);
      coord.bus.delay = number_or(b, "coordination.bus", "delay", coord.bus.delay);
      coord.bus.drop_probability =
          number_or(b, "coordination.bus", "drop_probability", coord.bus.drop_probability);
      if (b.contains("seed") && !seed_override)
        coord.bus.seed =
            static_cast<std::uint64_t>(detail::as_number(b["seed"], "coordination.bus.seed"));
      else
        coord.bus.seed = cfg.seed + 1;
    } else {
      coord.bus.seed = cfg.seed + 1;
    }
    coord.bus.validate();
    // The consensus update runs on bus ticks, so the control step must tile
    // the bus period exactly.
    const double ratio = coord.bus.period / cfg.dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1.0e-9)
      throw ValidationError("dt must divide the bus period (period/dt = " +
                            std::to_string(ratio) + ")");
    cfg.coordination = std::move(coord);
  }

  // Building the path validates trajectory parameters and DSL sources.
  build_path(cfg.trajectory, base_dir);
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& filename,
                                    std::optional<std::uint64_t> seed_override = {}) {
  std::ifstream in(filename);
  if (!in) throw ValidationError("cannot open scenario '" + filename + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::size_t slash = filename.find_last_of('/');
  const std::string base_dir = slash == std::string::npos ? "." : filename.substr(0, slash);
  return load_scenario_text(text.str(), base_dir, seed_override);
}

}  // namespace gvf
