// Builtin trajectories with hand-derived exact derivatives.
//
// Registry names and positional parameters:
//   circle          cx cy r                      implicit
//   ellipse         cx cy a b rotation[rad]      implicit
//   ellipse3d       xo yo r zl zh alpha[deg]     parametric, 3D
//   lissajous3d     cx cy cz Ax Ay Az wx wy wz px py pz   parametric, 3D
//   circle2d_param  cx cy r                      parametric, 2D
//
// Gain scales differ per family: the circle level set is quadratic in meters
// (value ~ 2*r*d near the curve), while the ellipse level set is normalized
// (value ~ d * 2/max(a,b)), so convergence gains that work for one are orders
// of magnitude off for the other.  See the README gain guide.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gvf/errors.hpp"
#include "gvf/path.hpp"
#include "gvf/path_dsl.hpp"

namespace gvf {

// Level set (x-cx)^2 + (y-cy)^2 - r^2.
inline ImplicitPathSpec circle_implicit(Vec2 center, double r) {
  if (r <= 0.0) throw ValidationError("circle radius must be positive");
  return {[center, r](Vec2 p) {
    const Vec2 d = p - center;
    ImplicitSample s;
    s.value = d.x * d.x + d.y * d.y - r * r;
    s.grad = {2.0 * d.x, 2.0 * d.y};
    s.hess = {2.0, 0.0, 0.0, 2.0};
    return s;
  }};
}

// Level set (x'/a)^2 + (y'/b)^2 - 1 where (x', y') are the coordinates of
// p - center in a frame rotated by `rotation` radians.  With u = A (p - c),
// A = R(-rotation) and D = diag(1/a^2, 1/b^2):
//   phi  = u' D u - 1,   grad = 2 A' D A (p - c),   hess = 2 A' D A.
inline ImplicitPathSpec ellipse_implicit(Vec2 center, double a, double b, double rotation) {
  if (a <= 0.0 || b <= 0.0) throw ValidationError("ellipse semi-axes must be positive");
  const double c = std::cos(rotation), s = std::sin(rotation);
  // M = 2 A' D A, symmetric.
  const double da = 2.0 / (a * a), db = 2.0 / (b * b);
  const Mat2 m{c * c * da + s * s * db, c * s * da - s * c * db,
               c * s * da - s * c * db, s * s * da + c * c * db};
  return {[center, a, b, c, s, m](Vec2 p) {
    const Vec2 d = p - center;
    const double xr = c * d.x + s * d.y;   // ellipse-frame coordinates
    const double yr = -s * d.x + c * d.y;
    ImplicitSample out;
    out.value = (xr / a) * (xr / a) + (yr / b) * (yr / b) - 1.0;
    out.grad = m * d;
    out.hess = m;
    return out;
  }};
}

// 3D ellipse: a horizontal circle of radius r at (xo, yo) whose altitude
// oscillates between zl and zh; alpha (degrees) sets where the low point sits.
//   f1 = r cos(w) + xo
//   f2 = r sin(w) + yo
//   f3 = (zh + zl + (zl - zh) sin(alpha - w)) / 2
// zl == zh degenerates to a flat circle.
inline ParametricPathSpec ellipse3d_parametric(double xo, double yo, double r, double zl,
                                               double zh, double alpha_deg) {
  if (r <= 0.0) throw ValidationError("ellipse3d radius must be positive");
  if (zh < zl) throw ValidationError("ellipse3d needs zh >= zl");
  const double alpha = alpha_deg * kPi / 180.0;
  return {3, [xo, yo, r, zl, zh, alpha](double w) {
            const double sw = std::sin(w), cw = std::cos(w);
            const double sa = std::sin(alpha - w), ca = std::cos(alpha - w);
            ParametricSample s;
            s.pos = {r * cw + xo, r * sw + yo, 0.5 * (zh + zl + (zl - zh) * sa)};
            s.vel = {-r * sw, r * cw, -0.5 * (zl - zh) * ca};
            s.acc = {-r * cw, -r * sw, -0.5 * (zl - zh) * sa};
            return s;
          }};
}

// Lissajous curve: f_i = c_i + A_i cos(w_i * w + p_i) per axis.  Zero
// frequency freezes an axis at c_i + A_i cos(p_i); amplitudes must be >= 0.
inline ParametricPathSpec lissajous3d_parametric(Vec3 center, Vec3 amplitude, Vec3 frequency,
                                                 Vec3 phase) {
  if (amplitude.x < 0.0 || amplitude.y < 0.0 || amplitude.z < 0.0)
    throw ValidationError("lissajous3d amplitudes must be nonnegative");
  return {3, [center, amplitude, frequency, phase](double w) {
            ParametricSample s;
            const double c[] = {center.x, center.y, center.z};
            const double amp[] = {amplitude.x, amplitude.y, amplitude.z};
            const double om[] = {frequency.x, frequency.y, frequency.z};
            const double ph[] = {phase.x, phase.y, phase.z};
            double* pos[] = {&s.pos.x, &s.pos.y, &s.pos.z};
            double* vel[] = {&s.vel.x, &s.vel.y, &s.vel.z};
            double* acc[] = {&s.acc.x, &s.acc.y, &s.acc.z};
            for (int i = 0; i < 3; ++i) {
              const double arg = om[i] * w + ph[i];
              *pos[i] = c[i] + amp[i] * std::cos(arg);
              *vel[i] = -amp[i] * om[i] * std::sin(arg);
              *acc[i] = -amp[i] * om[i] * om[i] * std::cos(arg);
            }
            return s;
          }};
}

// Parametric unit of the circle family: f = (cx + r cos w, cy + r sin w).
inline ParametricPathSpec circle2d_parametric(Vec2 center, double r) {
  if (r <= 0.0) throw ValidationError("circle radius must be positive");
  return {2, [center, r](double w) {
            const double sw = std::sin(w), cw = std::cos(w);
            ParametricSample s;
            s.pos = {center.x + r * cw, center.y + r * sw, 0.0};
            s.vel = {-r * sw, r * cw, 0.0};
            s.acc = {-r * cw, -r * sw, 0.0};
            return s;
          }};
}

inline const std::vector<std::string>& trajectory_names() {
  static const std::vector<std::string> names = {"circle", "ellipse", "ellipse3d", "lissajous3d",
                                                 "circle2d_param"};
  return names;
}

namespace detail {
inline void need_params(const std::string& name, const std::vector<double>& p, std::size_t n) {
  if (p.size() != n)
    throw ValidationError("trajectory '" + name + "' takes " + std::to_string(n) +
                          " parameters, got " + std::to_string(p.size()));
}
}  // namespace detail

// Build a builtin trajectory from its registry name and positional parameters.
inline PathSpec make_trajectory(const std::string& name, const std::vector<double>& p) {
  if (name == "circle") {
    detail::need_params(name, p, 3);
    return circle_implicit({p[0], p[1]}, p[2]);
  }
  if (name == "ellipse") {
    detail::need_params(name, p, 5);
    return ellipse_implicit({p[0], p[1]}, p[2], p[3], p[4]);
  }
  if (name == "ellipse3d") {
    detail::need_params(name, p, 6);
    return ellipse3d_parametric(p[0], p[1], p[2], p[3], p[4], p[5]);
  }
  if (name == "lissajous3d") {
    detail::need_params(name, p, 12);
    return lissajous3d_parametric({p[0], p[1], p[2]}, {p[3], p[4], p[5]}, {p[6], p[7], p[8]},
                                  {p[9], p[10], p[11]});
  }
  if (name == "circle2d_param") {
    detail::need_params(name, p, 3);
    return circle2d_parametric({p[0], p[1]}, p[2]);
  }
  std::string known;
  for (const auto& n : trajectory_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown trajectory '" + name + "'; available: " + known);
}

}  // namespace gvf
