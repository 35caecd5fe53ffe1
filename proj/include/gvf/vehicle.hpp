// Fixed-wing kinematic simulation: unicycle with wind.
//
// The vehicle flies at constant airspeed along its heading; ground velocity
// is airspeed plus wind, so crab angles (heading != course) emerge whenever
// the guidance law commands a ground course in nonzero wind.  Horizontal
// state (x, y, heading) integrates with a fixed-step RK4; the vertical
// channel is a first-order lag toward the commanded vertical speed,
// integrated exactly.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "gvf/errors.hpp"
#include "gvf/geometry.hpp"
#include "gvf/types.hpp"

namespace gvf {

struct VehicleState {
  Vec3 position;                // ENU [m]
  double heading = 0.0;         // [rad], wrapped to (-pi, pi]
  double airspeed = 11.0;       // constant per vehicle [m/s]
  double vertical_speed = 0.0;  // actual (lagged) [m/s]
  double w = 0.0;               // virtual coordinate (parametric guidance)
  double t = 0.0;               // [s]
};

// Mean wind plus a rotating sinusoidal gust:
//   wind(t) = mean + A * (cos(2 pi t / T + ph1), sin(2 pi t / T + ph2))
// with both phases drawn once from the seed, so a (seed, t) pair always
// yields the same wind on every platform.
struct WindModel {
  Vec2 mean;
  double gust_amplitude = 0.0;  // [m/s]
  double gust_period = 1.0;     // [s]
  std::uint64_t seed = 0;
  double phase1 = 0.0;
  double phase2 = 0.0;

  static WindModel make(Vec2 mean, double gust_amplitude = 0.0, double gust_period = 1.0,
                        std::uint64_t seed = 0) {
    if (gust_amplitude < 0.0) throw ValidationError("gust amplitude must be nonnegative");
    if (gust_amplitude > 0.0 && gust_period <= 0.0)
      throw ValidationError("gust period must be positive");
    WindModel w{mean, gust_amplitude, gust_period, seed, 0.0, 0.0};
    // Map raw engine draws to [0, 2 pi) by hand; the std distributions are
    // implementation-defined and would break cross-platform determinism.
    std::mt19937_64 rng(seed);
    auto draw = [&rng] { return (rng() >> 11) * 0x1.0p-53 * 2.0 * kPi; };
    w.phase1 = draw();
    w.phase2 = draw();
    return w;
  }
};

inline Vec2 wind_at(const WindModel& w, double t) {
  if (w.gust_amplitude == 0.0) return w.mean;
  const double arg = 2.0 * kPi * t / w.gust_period;
  return w.mean + w.gust_amplitude * Vec2{std::cos(arg + w.phase1), std::sin(arg + w.phase2)};
}

struct GroundTrack {
  double course = 0.0;  // [rad]
  double speed = 0.0;   // [m/s]
};

inline GroundTrack ground_course_and_speed(const VehicleState& s, const WindModel& wind,
                                           double t) {
  const Vec2 v = Vec2{s.airspeed * std::cos(s.heading), s.airspeed * std::sin(s.heading)} +
                 wind_at(wind, t);
  const double speed = norm(v);
  if (speed < 1.0e-9)
    throw ZeroGroundSpeedError("ground velocity is zero; course undefined at t = " +
                               std::to_string(t));
  return {std::atan2(v.y, v.x), speed};
}

// Advance one control period.  dt must be in (0, 0.1]; the default control
// rate is 50 Hz (dt = 0.02).  The heading-rate command saturates at the
// actuator limit; heading stays wrapped; airspeed never changes.
inline VehicleState step_vehicle(const VehicleState& s, const GuidanceCommand& cmd,
                                 const WindModel& wind, const ActuatorLimits& limits,
                                 double dt) {
  if (!(dt > 0.0) || dt > 0.1)
    throw ValidationError("step dt must be in (0, 0.1], got " + std::to_string(dt));
  const double omega = clamp(cmd.heading_rate, -limits.omega_max, limits.omega_max);

  // RK4 over (x, y, heading); heading' = omega is exact for constant omega,
  // so the stage headings are evaluated analytically.
  struct Deriv {
    Vec2 v;
    double psi_dot;
  };
  auto f = [&](double tau, double psi) -> Deriv {
    return {Vec2{s.airspeed * std::cos(psi), s.airspeed * std::sin(psi)} +
                wind_at(wind, s.t + tau),
            omega};
  };
  const Deriv k1 = f(0.0, s.heading);
  const Deriv k2 = f(0.5 * dt, s.heading + 0.5 * dt * k1.psi_dot);
  const Deriv k3 = f(0.5 * dt, s.heading + 0.5 * dt * k2.psi_dot);
  const Deriv k4 = f(dt, s.heading + dt * k3.psi_dot);

  VehicleState next = s;
  const Vec2 dp = (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v) * (dt / 6.0);
  next.position.x += dp.x;
  next.position.y += dp.y;
  next.heading = wrap_to_pi(s.heading + omega * dt);

  // Vertical channel: first-order lag toward the commanded rate, both the
  // rate update and the altitude integral taken in closed form.
  const double vz_target = clamp(cmd.vz, -limits.vz_max, limits.vz_max);
  const double tau = limits.vz_time_constant;
  const double decay = std::exp(-dt / tau);
  next.vertical_speed = vz_target + (s.vertical_speed - vz_target) * decay;
  next.position.z += vz_target * dt + (s.vertical_speed - vz_target) * tau * (1.0 - decay);

  next.t = s.t + dt;
  return next;
}

}  // namespace gvf
