// Singularity-free guidance over a parametric path.
//
// The path w -> f(w) is lifted into an augmented space that joins the n
// physical coordinates with the virtual coordinate w.  Tracking errors are
//   e_i = p_i - f_i(wb),        wb = w * beta * s,
// and the augmented field combines the tangent of the lifted path with error
// descent:
//   field_i = sigma * beta * s * f_i'(wb) - k_i * e_i     (physical part)
//   field_w = sigma + beta * s * sum_i k_i e_i f_i'(wb)   (virtual part)
// where sigma = (-1)^n.  On the path (e = 0) this is exactly tangent to the
// lifted curve, so the error stays zero; off the path the norm never drops to
// zero, which is what lets the law track self-intersecting curves -- the w
// coordinate disambiguates the branches.
//
// Travel direction on the path is sigma * beta * s * f'(wb): 2D paths run
// along increasing wb when s = +1, 3D paths along decreasing wb; flipping s
// reverses either.  The w rate matches the vehicle's actual ground speed.
// f''(w) is available in ParametricSample as a curvature-feedforward slot,
// but the current course law is proportional-only.
#pragma once

#include <cmath>

#include "gvf/errors.hpp"
#include "gvf/geometry.hpp"
#include "gvf/path.hpp"
#include "gvf/types.hpp"

namespace gvf {

struct PGvfGains {
  double kx = 0.01;  // per-axis error gains [1/s-ish, see README]
  double ky = 0.01;
  double kz = 0.01;
  double kn = 1.0;    // course-alignment gain [1/s]
  double beta = 1.0;  // virtual-coordinate scale: wb = w * beta * s
  int s = 1;          // travel direction, +1 or -1

  void validate() const {
    if (kx <= 0.0 || ky <= 0.0 || kz <= 0.0)
      throw ValidationError("parametric gains kx, ky, kz must be positive");
    if (kn <= 0.0) throw ValidationError("parametric gain kn must be positive");
    if (beta <= 0.0) throw ValidationError("parametric gain beta must be positive");
    if (s != 1 && s != -1) throw ValidationError("parametric direction s must be +1 or -1");
  }
};

// No course is defined when the horizontal field part is this small.
inline constexpr double kDegenerateHorizontalEps = 1.0e-9;

struct ParametricFieldSample {
  int dims = 0;          // physical dimensions (2 or 3)
  Vec3 error;            // e_i = p_i - f_i(wb); z is zero for 2D paths
  Vec3 phys;             // physical field components
  double w_term = 0.0;   // virtual-coordinate field component
  ParametricSample path; // f, f', f'' at wb
};

inline double wb_of(double w, const PGvfGains& gains) {
  return w * gains.beta * static_cast<double>(gains.s);
}

inline Vec3 parametric_errors(Vec3 p, double w, const ParametricPathSpec& path,
                              const PGvfGains& gains) {
  gains.validate();
  const ParametricSample s = path.sample(wb_of(w, gains));
  Vec3 e = p - s.pos;
  if (path.dims == 2) e.z = 0.0;
  return e;
}

inline ParametricFieldSample parametric_field(Vec3 p, double w, const ParametricPathSpec& path,
                                              const PGvfGains& gains) {
  gains.validate();
  const double bs = gains.beta * static_cast<double>(gains.s);
  const ParametricSample s = path.sample(w * bs);
  const double sigma = path.dims % 2 == 0 ? 1.0 : -1.0;
  ParametricFieldSample out;
  out.dims = path.dims;
  out.path = s;
  out.error = p - s.pos;
  if (path.dims == 2) out.error.z = 0.0;
  const double k[] = {gains.kx, gains.ky, gains.kz};
  const double e[] = {out.error.x, out.error.y, out.error.z};
  const double fd[] = {s.vel.x, s.vel.y, s.vel.z};
  double* phys[] = {&out.phys.x, &out.phys.y, &out.phys.z};
  out.w_term = sigma;
  for (int i = 0; i < path.dims; ++i) {
    *phys[i] = sigma * bs * fd[i] - k[i] * e[i];
    out.w_term += bs * k[i] * e[i] * fd[i];
  }
  return out;
}

// Course, vertical-speed and w-rate setpoints from the augmented field.  The
// horizontal field part steers the course; the vertical part is converted to
// a climb rate by direction matching at the current ground speed; the w rate
// scales the virtual-coordinate component by the same factor so the virtual
// point advances with the vehicle.
inline GuidanceCommand parametric_guidance(const GuidanceState& state,
                                           const ParametricPathSpec& path,
                                           const PGvfGains& gains, const ActuatorLimits& limits) {
  const ParametricFieldSample f = parametric_field(state.position, state.w, path, gains);
  const double horiz = norm(Vec2{f.phys.x, f.phys.y});
  if (horiz < kDegenerateHorizontalEps)
    throw DegenerateHorizontalError("horizontal field component vanished at w = " +
                                    std::to_string(state.w));
  if (state.ground_speed < kMinGroundSpeed)
    throw StallSpeedError("ground speed " + std::to_string(state.ground_speed) +
                          " m/s is too low to steer");
  const double chi_d = std::atan2(f.phys.y, f.phys.x);
  GuidanceCommand cmd;
  cmd.heading_rate = clamp(gains.kn * wrap_to_pi(chi_d - state.course), -limits.omega_max,
                           limits.omega_max);
  cmd.roll = roll_setpoint(cmd.heading_rate, state.ground_speed, limits.roll_max);
  if (f.dims == 3)
    cmd.vz = clamp(state.ground_speed * f.phys.z / horiz, -limits.vz_max, limits.vz_max);
  cmd.w_rate = f.w_term * state.ground_speed / horiz;
  return cmd;
}

// The virtual coordinate is controller state, advanced by explicit Euler.
inline double step_w(double w, double w_rate, double dt) { return w + w_rate * dt; }

}  // namespace gvf
