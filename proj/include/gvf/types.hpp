// Control-facing value types shared by the guidance laws and the simulator.
#pragma once

#include <cmath>

#include "gvf/errors.hpp"
#include "gvf/geometry.hpp"

namespace gvf {

// Saturations of the vehicle actuators.  omega_max is tied to the bank-angle
// limit through the coordinated-turn relation omega = g tan(roll) / v, so use
// for_airspeed() to build a consistent set at the vehicle's nominal airspeed.
struct ActuatorLimits {
  double omega_max = 0.83;        // heading-rate limit [rad/s]
  double roll_max = 0.75;         // bank-angle limit [rad]
  double vz_max = 3.0;            // vertical-speed limit [m/s]
  double vz_time_constant = 1.0;  // first-order lag of the vertical channel [s]

  static ActuatorLimits for_airspeed(double airspeed, double roll_max = 0.75,
                                     double vz_max = 3.0, double vz_time_constant = 1.0) {
    if (airspeed <= 0.0) throw ValidationError("airspeed must be positive");
    if (roll_max <= 0.0 || roll_max >= kPi / 2.0)
      throw ValidationError("roll_max must be in (0, pi/2)");
    if (vz_max <= 0.0) throw ValidationError("vz_max must be positive");
    if (vz_time_constant <= 0.0) throw ValidationError("vz_time_constant must be positive");
    ActuatorLimits l;
    l.omega_max = kGravity * std::tan(roll_max) / airspeed;
    l.roll_max = roll_max;
    l.vz_max = vz_max;
    l.vz_time_constant = vz_time_constant;
    return l;
  }
};

// Kinematic snapshot consumed by the guidance laws.  Course and ground speed
// describe the actual ground-velocity vector (airspeed plus wind); `w` is the
// virtual coordinate owned by the parametric controller.
struct GuidanceState {
  Vec3 position;              // ENU [m]
  double course = 0.0;        // ground-velocity direction [rad]
  double ground_speed = 0.0;  // horizontal ground speed [m/s]
  double w = 0.0;             // virtual coordinate
};

// Setpoints produced by one guidance step.
struct GuidanceCommand {
  double heading_rate = 0.0;  // [rad/s]
  double roll = 0.0;          // bank-angle equivalent of heading_rate [rad]
  double vz = 0.0;            // vertical-speed setpoint [m/s]
  double w_rate = 0.0;        // virtual-coordinate rate [1/s]
};

// Ground speeds below this value give no usable course control.
inline constexpr double kMinGroundSpeed = 0.5;  // [m/s]

// Bank angle that yields `heading_rate` in a coordinated turn at the given
// ground speed: atan(omega * v / g), clamped to roll_max.
inline double roll_setpoint(double heading_rate, double ground_speed, double roll_max = 0.75) {
  if (ground_speed <= 0.0) throw ValidationError("ground speed must be positive");
  return clamp(std::atan(heading_rate * ground_speed / kGravity), -roll_max, roll_max);
}

}  // namespace gvf
