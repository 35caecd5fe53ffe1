// Path descriptions consumed by the guidance laws.
//
// A path is either implicit -- the zero level set of a scalar field
// phi(x, y) -- or parametric -- a curve w -> f(w) in 2 or 3 dimensions.
// Both forms expose exactly the derivatives the guidance laws need.
#pragma once

#include <functional>
#include <stdexcept>

#include "gvf/geometry.hpp"

namespace gvf {

// Level-set value, gradient and Hessian of phi at one query point.
struct ImplicitSample {
  double value = 0.0;
  Vec2 grad;
  Mat2 hess;
};

struct ImplicitPathSpec {
  std::function<ImplicitSample(Vec2)> eval;

  ImplicitSample sample(Vec2 p) const { return eval(p); }
  double value(Vec2 p) const { return eval(p).value; }
  Vec2 grad(Vec2 p) const { return eval(p).grad; }
  Mat2 hess(Vec2 p) const { return eval(p).hess; }
};

// Shift the tracked level set: the returned path has value(p) - offset, with
// unchanged gradient and Hessian.  Positive offsets select the level set
// "outside" the original curve for fields whose value grows outward.
inline ImplicitPathSpec offset_level_set(ImplicitPathSpec base, double offset) {
  return {[base = std::move(base), offset](Vec2 p) {
    ImplicitSample s = base.eval(p);
    s.value -= offset;
    return s;
  }};
}

// Position and first/second derivatives with respect to the curve parameter.
// For 2D curves the z components are zero.
struct ParametricSample {
  Vec3 pos;
  Vec3 vel;  // d f / d w
  Vec3 acc;  // d^2 f / d w^2
};

struct ParametricPathSpec {
  int dims = 0;  // 2 or 3
  std::function<ParametricSample(double)> eval;

  ParametricSample sample(double w) const { return eval(w); }
};

}  // namespace gvf
