// Guiding vector field over an implicit 2D path.
//
// The path is the zero level set of phi(x, y).  At a point p the desired
// velocity combines a tangential term (the gradient rotated +90 degrees,
// giving travel along the level set) with a normal term that descends the
// squared level-set value:
//
//   field(p) = s * E * grad(p) - ke * phi(p) * grad(p),      E = +90deg CCW
//
// s = +1 picks counter-clockwise travel around a circle, s = -1 clockwise.
// The commanded heading rate tracks the field direction and adds the rate at
// which the field itself rotates along the current ground velocity, so a
// vehicle already on the path banks with the curvature instead of lagging it.
#pragma once

#include <cmath>

#include "gvf/errors.hpp"
#include "gvf/geometry.hpp"
#include "gvf/path.hpp"
#include "gvf/types.hpp"

namespace gvf {

struct GvfGains {
  double ke = 1.0e-3;  // level-set convergence gain [1 / phi-unit]
  double kn = 0.8;     // course-alignment gain [1/s]
  int s = 1;           // travel direction, +1 or -1

  void validate() const {
    if (ke <= 0.0) throw ValidationError("gvf gain ke must be positive");
    if (kn <= 0.0) throw ValidationError("gvf gain kn must be positive");
    if (s != 1 && s != -1) throw ValidationError("gvf direction s must be +1 or -1");
  }
};

// Fields below this norm are treated as singular (gradient vanished or the
// tangential and normal terms cancelled exactly).
inline constexpr double kSingularFieldEps = 1.0e-6;

struct FieldSample2D {
  Vec2 vec;               // unnormalized field value
  Vec2 unit;              // field direction
  double error = 0.0;     // level-set value at the query point
  double grad_norm = 0.0; // norm of the level-set gradient
};

inline FieldSample2D field_2d(Vec2 p, const ImplicitPathSpec& path, const GvfGains& gains) {
  gains.validate();
  const ImplicitSample s = path.sample(p);
  const Vec2 tangent = static_cast<double>(gains.s) * rot90_ccw(s.grad);
  const Vec2 vec = tangent - gains.ke * s.value * s.grad;
  const double n = norm(vec);
  if (n < kSingularFieldEps)
    throw SingularFieldError("guidance field vanished at (" + std::to_string(p.x) + ", " +
                             std::to_string(p.y) + ")");
  return {vec, vec / n, s.value, norm(s.grad)};
}

// Rate of change of the field value seen while moving with velocity v:
//   d/dt field = (s E - ke phi I) H v - ke (grad . v) grad
// with H the Hessian of phi at p.
inline Vec2 field_material_derivative(Vec2 p, Vec2 v, const ImplicitPathSpec& path,
                                      const GvfGains& gains) {
  gains.validate();
  const ImplicitSample s = path.sample(p);
  const Vec2 hv = s.hess * v;
  return static_cast<double>(gains.s) * rot90_ccw(hv) - gains.ke * s.value * hv -
         gains.ke * dot(s.grad, v) * s.grad;
}

// Heading-rate setpoint: feedforward field rotation plus proportional course
// alignment, clamped to the actuator limit.  Also fills the equivalent bank
// angle.  Throws SingularFieldError / StallSpeedError when no command exists.
inline GuidanceCommand heading_rate_command(const GuidanceState& state,
                                            const ImplicitPathSpec& path, const GvfGains& gains,
                                            const ActuatorLimits& limits) {
  if (state.ground_speed < kMinGroundSpeed)
    throw StallSpeedError("ground speed " + std::to_string(state.ground_speed) +
                          " m/s is too low to steer");
  const FieldSample2D f = field_2d(state.position.xy(), path, gains);
  const Vec2 v{state.ground_speed * std::cos(state.course),
               state.ground_speed * std::sin(state.course)};
  const Vec2 df = field_material_derivative(state.position.xy(), v, path, gains);
  // Rotation rate of the field direction along the actual motion.
  const double omega_ff = cross_z(f.vec, df) / dot(f.vec, f.vec);
  const double chi_d = std::atan2(f.unit.y, f.unit.x);
  const double delta = wrap_to_pi(chi_d - state.course);
  GuidanceCommand cmd;
  cmd.heading_rate = clamp(omega_ff + gains.kn * delta, -limits.omega_max, limits.omega_max);
  cmd.roll = roll_setpoint(cmd.heading_rate, state.ground_speed, limits.roll_max);
  return cmd;
}

}  // namespace gvf
