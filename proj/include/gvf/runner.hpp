// Deterministic scenario runner: lockstep multi-vehicle simulation, telemetry
// capture, run metrics, and field-grid export.
//
// Loop order per control tick (t = k * dt, computed by multiplication so tick
// times are exact):
//   1. On bus ticks (every period / dt steps): every vehicle broadcasts its
//      coordination value (circle phase for gvf, virtual coordinate for
//      pgvf), the bus delivers what is due, and each vehicle recomputes its
//      consensus correction from the latest received values (zero-order hold
//      until the next bus tick).
//   2. Every vehicle computes its guidance command from its own pre-step
//      state; a telemetry row is written per vehicle (state at tick start +
//      the command applied over the tick).
//   3. All vehicles step together.
// Guidance failures abort the run with a message naming the vehicle, time,
// and offending state.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gvf/coordination.hpp"
#include "gvf/errors.hpp"
#include "gvf/gvf_implicit.hpp"
#include "gvf/gvf_parametric.hpp"
#include "gvf/scenario.hpp"
#include "gvf/vehicle.hpp"

namespace gvf {

// One telemetry row: vehicle state at the start of a control tick plus the
// command applied over that tick.  For gvf runs `e` is the level-set value at
// the vehicle (before any coordination shift) and ex/ey/ez are zero; for pgvf
// runs ex/ey/ez are the per-axis tracking errors and e is their norm.
// `coord` is the active consensus correction (level-set shift for gvf, w-rate
// correction for pgvf); `msgs` counts bus messages received so far.
struct TelemetryRecord {
  double t = 0.0;
  int vehicle = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  double heading = 0.0;
  double course = 0.0;
  double roll_cmd = 0.0;
  double omega_cmd = 0.0;
  double vz_cmd = 0.0;
  double e = 0.0;
  double ex = 0.0, ey = 0.0, ez = 0.0;
  double w = 0.0;
  double coord = 0.0;
  std::uint64_t msgs = 0;
};

inline constexpr char kTelemetryHeader[] =
    "t,vehicle,x,y,z,heading,course,roll_cmd,omega_cmd,vz_cmd,e,ex,ey,ez,w,coord,msgs";

// Serialize telemetry with fixed %.9g formatting; reruns of the same scenario
// and seed produce identical bytes.
inline std::string telemetry_csv(const std::vector<TelemetryRecord>& records) {
  std::string out = "# gvf-telemetry v1\n";
  out += kTelemetryHeader;
  out += '\n';
  char line[512];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line,
                  "%.9g,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                  "%llu\n",
                  r.t, r.vehicle, r.x, r.y, r.z, r.heading, r.course, r.roll_cmd, r.omega_cmd,
                  r.vz_cmd, r.e, r.ex, r.ey, r.ez, r.w, r.coord,
                  static_cast<unsigned long long>(r.msgs));
    out += line;
  }
  return out;
}

struct VehicleMetrics {
  int vehicle = 0;
  std::string distance_metric;  // how distance-to-path was measured
  double steady_mean = 0.0;     // mean distance over the last quarter of the run
  double steady_max = 0.0;      // max distance over the last quarter of the run
  std::optional<double> convergence_time;  // earliest t after which distance
                                           // stays below the threshold
};

struct RunMetrics {
  double duration = 0.0;
  double dt = 0.0;
  std::vector<VehicleMetrics> vehicles;
  // (t, max |pairwise coordination error| over comm edges), sampled at bus
  // ticks from true vehicle states; empty without coordination.
  std::vector<std::pair<double, double>> consensus_trace;
  std::optional<double> final_consensus_error;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
};

struct RunResult {
  std::vector<TelemetryRecord> records;
  RunMetrics metrics;
};

namespace detail {

// Distance from a point to the builtin ellipse: coarse parameter sweep, then
// golden-section refinement of the closest-point parameter to 1e-9.
inline double ellipse_point_distance(Vec2 p, Vec2 center, double a, double b, double rotation) {
  const double cr = std::cos(rotation), sr = std::sin(rotation);
  auto dist = [&](double tau) {
    const double ex = a * std::cos(tau), ey = b * std::sin(tau);
    const Vec2 q{center.x + cr * ex - sr * ey, center.y + sr * ex + cr * ey};
    return norm(p - q);
  };
  const int kCoarse = 128;
  double best_tau = 0.0, best = dist(0.0);
  for (int i = 1; i < kCoarse; ++i) {
    const double tau = 2.0 * kPi * i / kCoarse;
    const double d = dist(tau);
    if (d < best) {
      best = d;
      best_tau = tau;
    }
  }
  double lo = best_tau - 2.0 * kPi / kCoarse;
  double hi = best_tau + 2.0 * kPi / kCoarse;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = dist(x1), f2 = dist(x2);
  while (hi - lo > 1.0e-9) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = dist(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = dist(x2);
    }
  }
  return dist((lo + hi) / 2.0);
}

struct DistanceMetric {
  std::string name;
  // Distance-to-path for one telemetry row.
  std::function<double(const TelemetryRecord&)> of;
};

inline DistanceMetric make_distance_metric(const ScenarioConfig& cfg,
                                           const std::string& base_dir) {
  const TrajectoryConfig& t = cfg.trajectory;
  if (t.is_builtin() && t.builtin == "circle") {
    const Vec2 c{t.builtin_params[0], t.builtin_params[1]};
    const double r = t.builtin_params[2];
    return {"circle_radial", [c, r](const TelemetryRecord& rec) {
              return std::abs(norm(Vec2{rec.x, rec.y} - c) - r);
            }};
  }
  if (t.is_builtin() && t.builtin == "ellipse") {
    const Vec2 c{t.builtin_params[0], t.builtin_params[1]};
    const double a = t.builtin_params[2], b = t.builtin_params[3];
    const double rot = t.builtin_params[4];
    return {"ellipse_projection", [c, a, b, rot](const TelemetryRecord& rec) {
              return ellipse_point_distance({rec.x, rec.y}, c, a, b, rot);
            }};
  }
  if (cfg.mode == GuidanceMode::kPgvf) {
    // Per-axis errors are already in the telemetry; e is their norm.
    return {"parametric_error_norm", [](const TelemetryRecord& rec) { return rec.e; }};
  }
  // Custom implicit curve: first-order distance estimate |phi| / |grad phi|.
  PathSpec path = build_path(t, base_dir);
  auto implicit = std::get<ImplicitPathSpec>(std::move(path));
  return {"level_set_first_order", [implicit](const TelemetryRecord& rec) {
            const ImplicitSample s = implicit.sample({rec.x, rec.y});
            const double g = norm(s.grad);
            return std::abs(s.value) / (g > 1.0e-12 ? g : 1.0e-12);
          }};
}

}  // namespace detail

// Per-vehicle distance statistics plus the consensus trace summary.  Exposed
// separately from run_scenario so synthetic records can be scored in tests.
inline RunMetrics compute_metrics(const ScenarioConfig& cfg,
                                  const std::vector<TelemetryRecord>& records,
                                  std::vector<std::pair<double, double>> consensus_trace = {},
                                  std::uint64_t delivered = 0, std::uint64_t dropped = 0,
                                  const std::string& base_dir = ".") {
  RunMetrics m;
  m.duration = cfg.duration;
  m.dt = cfg.dt;
  m.messages_delivered = delivered;
  m.messages_dropped = dropped;
  m.consensus_trace = std::move(consensus_trace);
  if (!m.consensus_trace.empty()) m.final_consensus_error = m.consensus_trace.back().second;

  const detail::DistanceMetric metric = detail::make_distance_metric(cfg, base_dir);
  const double t_end = records.empty() ? 0.0 : records.back().t;
  const double steady_from = 0.75 * t_end;
  for (std::size_t v = 0; v < cfg.vehicles.size(); ++v) {
    VehicleMetrics vm;
    vm.vehicle = static_cast<int>(v);
    vm.distance_metric = metric.name;
    double sum = 0.0, mx = 0.0;
    std::size_t count = 0;
    // Latest row from which distance >= threshold somewhere at or after it.
    std::optional<double> last_above;
    bool any = false;
    for (const auto& rec : records) {
      if (rec.vehicle != static_cast<int>(v)) continue;
      any = true;
      const double d = metric.of(rec);
      if (rec.t >= steady_from) {
        sum += d;
        mx = std::max(mx, d);
        ++count;
      }
      if (d >= cfg.convergence_threshold) last_above = rec.t;
    }
    if (count > 0) vm.steady_mean = sum / static_cast<double>(count);
    vm.steady_max = mx;
    if (any) {
      if (!last_above) {
        vm.convergence_time = 0.0;  // below threshold from the first row
      } else {
        // First row time strictly after the last excursion.
        std::optional<double> first_after;
        for (const auto& rec : records) {
          if (rec.vehicle != static_cast<int>(v) || rec.t <= *last_above) continue;
          if (!first_after || rec.t < *first_after) first_after = rec.t;
        }
        vm.convergence_time = first_after;  // empty if it never settles
      }
    }
    m.vehicles.push_back(std::move(vm));
  }
  return m;
}

inline nlohmann::json metrics_to_json(const RunMetrics& m) {
  nlohmann::json j;
  j["schema"] = "gvf-metrics v1";
  j["duration"] = m.duration;
  j["dt"] = m.dt;
  j["vehicles"] = nlohmann::json::array();
  for (const auto& v : m.vehicles) {
    nlohmann::json jv;
    jv["vehicle"] = v.vehicle;
    jv["distance_metric"] = v.distance_metric;
    jv["steady_mean_distance"] = v.steady_mean;
    jv["steady_max_distance"] = v.steady_max;
    jv["convergence_time"] =
        v.convergence_time ? nlohmann::json(*v.convergence_time) : nlohmann::json();
    j["vehicles"].push_back(std::move(jv));
  }
  if (m.final_consensus_error) {
    nlohmann::json jc;
    jc["final_error"] = *m.final_consensus_error;
    jc["trace"] = nlohmann::json::array();
    for (const auto& [t, err] : m.consensus_trace) jc["trace"].push_back({t, err});
    j["consensus"] = std::move(jc);
    j["bus"] = {{"delivered", m.messages_delivered}, {"dropped", m.messages_dropped}};
  }
  return j;
}

// Run a scenario to completion.  Throws GuidanceError (singular field, stall,
// degenerate horizontal field) with vehicle/time/state context, and
// ValidationError for configs that fail late (e.g. a field singularity at a
// vehicle start position is a GuidanceError at t = 0).
inline RunResult run_scenario(const ScenarioConfig& cfg, const std::string& base_dir = ".") {
  const PathSpec path = build_path(cfg.trajectory, base_dir);
  const ImplicitPathSpec* implicit = std::get_if<ImplicitPathSpec>(&path);
  const ParametricPathSpec* parametric = std::get_if<ParametricPathSpec>(&path);
  const bool pgvf = cfg.mode == GuidanceMode::kPgvf;
  const std::size_t n = cfg.vehicles.size();

  std::vector<VehicleState> states(n);
  std::vector<ActuatorLimits> limits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const VehicleConfig& vc = cfg.vehicles[i];
    states[i].position = vc.position;
    states[i].heading = vc.heading;
    states[i].airspeed = vc.airspeed;
    states[i].vertical_speed = 0.0;
    states[i].w = vc.w;
    states[i].t = 0.0;
    limits[i] = cfg.limits_for(vc);
  }

  // Coordination state.  level_set_offset() is oriented for phases that
  // decrease along travel; circle phase increases along travel for s = +1, so
  // the applied shift carries a -s factor.
  const bool coord_on = cfg.coordination.has_value();
  std::optional<MessageBus> bus;
  std::vector<double> level_shift(n, 0.0);  // gvf: shift fed to the field
  std::vector<double> w_corr(n, 0.0);       // pgvf: extra w rate
  std::vector<std::uint64_t> msgs_received(n, 0);
  std::vector<std::pair<double, double>> consensus_trace;
  long bus_every = 0;
  Vec2 circle_center{0.0, 0.0};
  if (coord_on) {
    bus.emplace(MessageBus::for_graph(cfg.coordination->bus, cfg.coordination->graph));
    bus_every = std::lround(cfg.coordination->bus.period / cfg.dt);
    if (!pgvf) circle_center = {cfg.trajectory.builtin_params[0], cfg.trajectory.builtin_params[1]};
  }
  auto coord_value = [&](const VehicleState& s) {
    if (pgvf) return s.w;
    return std::atan2(s.position.y - circle_center.y, s.position.x - circle_center.x);
  };

  const long n_steps = static_cast<long>(std::floor(cfg.duration / cfg.dt + 1.0e-9));
  RunResult result;
  result.records.reserve(static_cast<std::size_t>(n_steps) * n);
  std::vector<GuidanceCommand> cmds(n);

  for (long k = 0; k < n_steps; ++k) {
    const double now = static_cast<double>(k) * cfg.dt;

    if (coord_on && k % bus_every == 0) {
      std::vector<BusMessage> outbox;
      outbox.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        outbox.push_back({static_cast<int>(i), coord_value(states[i]), now});
      for (const Delivery& d : bus->tick(outbox, now)) ++msgs_received[d.receiver];
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<NeighborSample> samples;
        const auto& latest = bus->latest(static_cast<int>(i));
        for (const auto& nb : cfg.coordination->graph.neighbors(static_cast<int>(i))) {
          auto it = latest.find(nb.id);
          if (it != latest.end()) samples.push_back({it->second.value, nb.offset});
        }
        if (pgvf) {
          w_corr[i] = w_rate_correction(states[i].w, samples, cfg.coordination->kc);
        } else {
          const double raw = level_set_offset(coord_value(states[i]), samples,
                                              cfg.coordination->kc, cfg.coordination->e_max);
          level_shift[i] = -static_cast<double>(cfg.vehicle_gvf_gains[i].s) * raw;
        }
      }
      // Trace the true (not communicated) coordination error.
      double worst = 0.0;
      for (const auto& e : cfg.coordination->graph.edges) {
        double err = coord_value(states[e.b]) - coord_value(states[e.a]) - e.offset;
        if (!pgvf) err = wrap_to_pi(err);
        worst = std::max(worst, std::abs(err));
      }
      consensus_trace.emplace_back(now, worst);
    }

    for (std::size_t i = 0; i < n; ++i) {
      try {
        const GroundTrack track = ground_course_and_speed(states[i], cfg.wind, states[i].t);
        GuidanceState gs;
        gs.position = states[i].position;
        gs.course = track.course;
        gs.ground_speed = track.speed;
        gs.w = states[i].w;

        TelemetryRecord rec;
        rec.t = now;
        rec.vehicle = static_cast<int>(i);
        rec.x = states[i].position.x;
        rec.y = states[i].position.y;
        rec.z = states[i].position.z;
        rec.heading = states[i].heading;
        rec.course = track.course;
        rec.w = states[i].w;
        rec.msgs = msgs_received[i];

        if (pgvf) {
          cmds[i] = parametric_guidance(gs, *parametric, cfg.vehicle_pgvf_gains[i], limits[i]);
          const Vec3 e =
              parametric_errors(states[i].position, states[i].w, *parametric,
                                cfg.vehicle_pgvf_gains[i]);
          rec.ex = e.x;
          rec.ey = e.y;
          rec.ez = e.z;
          rec.e = norm(e);
          rec.coord = w_corr[i];
        } else {
          const ImplicitPathSpec tracked =
              level_shift[i] != 0.0 ? offset_level_set(*implicit, level_shift[i]) : *implicit;
          cmds[i] = heading_rate_command(gs, tracked, cfg.vehicle_gvf_gains[i], limits[i]);
          rec.e = implicit->value(states[i].position.xy());
          rec.coord = level_shift[i];
        }
        rec.roll_cmd = cmds[i].roll;
        rec.omega_cmd = cmds[i].heading_rate;
        rec.vz_cmd = cmds[i].vz;
        result.records.push_back(rec);
      } catch (const GuidanceError& err) {
        char where[256];
        std::snprintf(where, sizeof where,
                      "vehicle %d at t=%.9g (x=%.9g y=%.9g z=%.9g heading=%.9g w=%.9g): ",
                      static_cast<int>(i), now, states[i].position.x, states[i].position.y,
                      states[i].position.z, states[i].heading, states[i].w);
        throw GuidanceError(std::string(where) + err.what());
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      states[i] = step_vehicle(states[i], cmds[i], cfg.wind, limits[i], cfg.dt);
      if (pgvf) states[i].w = step_w(states[i].w, cmds[i].w_rate + w_corr[i], cfg.dt);
      states[i].t = static_cast<double>(k + 1) * cfg.dt;  // keep tick times exact
    }
  }

  result.metrics = compute_metrics(cfg, result.records, std::move(consensus_trace),
                                   coord_on ? bus->delivered_count() : 0,
                                   coord_on ? bus->dropped_count() : 0, base_dir);
  return result;
}

// --- Field-grid export (for plotting the guidance field) ---

struct FieldGridRequest {
  int nx = 0, ny = 0;
  std::optional<std::array<double, 4>> bbox;  // xmin, ymin, xmax, ymax
  double w = 0.0;                             // pgvf: virtual coordinate of the slice
  std::optional<double> z;                    // pgvf 3D: altitude of the slice
};

namespace detail {

inline std::array<double, 4> default_bbox(const ScenarioConfig& cfg, const PathSpec& path) {
  const TrajectoryConfig& t = cfg.trajectory;
  if (t.is_builtin() && t.builtin == "circle") {
    const double m = 1.6 * t.builtin_params[2];
    return {t.builtin_params[0] - m, t.builtin_params[1] - m, t.builtin_params[0] + m,
            t.builtin_params[1] + m};
  }
  if (t.is_builtin() && t.builtin == "ellipse") {
    const double m = 1.6 * std::max(t.builtin_params[2], t.builtin_params[3]);
    return {t.builtin_params[0] - m, t.builtin_params[1] - m, t.builtin_params[0] + m,
            t.builtin_params[1] + m};
  }
  if (const auto* p = std::get_if<ParametricPathSpec>(&path)) {
    // Sample the curve and pad its bounding box.
    double xmin = 1.0e300, xmax = -1.0e300, ymin = 1.0e300, ymax = -1.0e300;
    for (int i = 0; i <= 512; ++i) {
      const double wb = -4.0 * kPi + 8.0 * kPi * i / 512.0;
      const ParametricSample s = p->sample(wb);
      xmin = std::min(xmin, s.pos.x);
      xmax = std::max(xmax, s.pos.x);
      ymin = std::min(ymin, s.pos.y);
      ymax = std::max(ymax, s.pos.y);
    }
    const double pad = std::max(10.0, 0.3 * std::max(xmax - xmin, ymax - ymin));
    return {xmin - pad, ymin - pad, xmax + pad, ymax + pad};
  }
  throw ValidationError("a bounding box is required for custom implicit trajectories");
}

}  // namespace detail

// Sample the guidance field on a regular grid (inclusive endpoints) and
// serialize as CSV: x,y,ux,uy,singular.  gvf grids hold the unit field
// direction, with singular = 1 where the field vanishes; pgvf grids hold the
// normalized horizontal field at fixed w (and fixed z for 3D paths,
// defaulting to the path altitude at w).  Rows scan y outer, x inner.
inline std::string field_grid_csv(const ScenarioConfig& cfg, const FieldGridRequest& req,
                                  const std::string& base_dir = ".") {
  if (req.nx < 1 || req.ny < 1) throw ValidationError("grid must be at least 1x1");
  const PathSpec path = build_path(cfg.trajectory, base_dir);
  const std::array<double, 4> box = req.bbox ? *req.bbox : detail::default_bbox(cfg, path);
  if (!(box[0] < box[2]) || !(box[1] < box[3]))
    throw ValidationError("bounding box must satisfy xmin < xmax and ymin < ymax");

  auto coordinate = [](double lo, double hi, int i, int count) {
    return count == 1 ? (lo + hi) / 2.0 : lo + (hi - lo) * i / (count - 1);
  };

  double z_slice = req.z.value_or(0.0);
  const ParametricPathSpec* parametric = std::get_if<ParametricPathSpec>(&path);
  if (cfg.mode == GuidanceMode::kPgvf && parametric->dims == 3 && !req.z)
    z_slice = parametric->sample(wb_of(req.w, cfg.pgvf_gains)).pos.z;

  std::string out = "# gvf-field v1\n";
  out += "x,y,ux,uy,singular\n";
  char line[256];
  for (int iy = 0; iy < req.ny; ++iy) {
    const double y = coordinate(box[1], box[3], iy, req.ny);
    for (int ix = 0; ix < req.nx; ++ix) {
      const double x = coordinate(box[0], box[2], ix, req.nx);
      Vec2 u{0.0, 0.0};
      int singular = 0;
      if (cfg.mode == GuidanceMode::kGvf) {
        try {
          u = field_2d({x, y}, std::get<ImplicitPathSpec>(path), cfg.gvf_gains).unit;
        } catch (const SingularFieldError&) {
          singular = 1;
        }
      } else {
        const ParametricFieldSample f =
            parametric_field({x, y, z_slice}, req.w, *parametric, cfg.pgvf_gains);
        const double h = norm(Vec2{f.phys.x, f.phys.y});
        if (h < 1.0e-12)
          singular = 1;
        else
          u = Vec2{f.phys.x / h, f.phys.y / h};
      }
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%d\n", x, y, u.x, u.y, singular);
      out += line;
    }
  }
  return out;
}

}  // namespace gvf
