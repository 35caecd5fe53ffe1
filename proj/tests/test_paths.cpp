// Tests for the trajectory layer: builtin paths with hand-derived derivatives,
// DSL-compiled paths, and the path-file format.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <variant>

#include "gvf/path_dsl.hpp"
#include "gvf/path_library.hpp"

namespace {

using Catch::Matchers::WithinAbs;
using gvf::ImplicitPathSpec;
using gvf::ImplicitSample;
using gvf::kPi;
using gvf::ParametricPathSpec;
using gvf::ParametricSample;
using gvf::Vec2;
using gvf::Vec3;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double mixed_rel(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

void check_implicit_agreement(const ImplicitPathSpec& lhs, const ImplicitPathSpec& rhs, Vec2 p,
                              double tol) {
  const ImplicitSample a = lhs.sample(p), b = rhs.sample(p);
  INFO("at (" << p.x << ", " << p.y << ")");
  CHECK(mixed_rel(a.value, b.value) < tol);
  CHECK(mixed_rel(a.grad.x, b.grad.x) < tol);
  CHECK(mixed_rel(a.grad.y, b.grad.y) < tol);
  CHECK(mixed_rel(a.hess.a11, b.hess.a11) < tol);
  CHECK(mixed_rel(a.hess.a12, b.hess.a12) < tol);
  CHECK(mixed_rel(a.hess.a21, b.hess.a21) < tol);
  CHECK(mixed_rel(a.hess.a22, b.hess.a22) < tol);
}

// First-order central differences of pos->vel and vel->acc. Both are
// well-conditioned in double (error ~ eps*scale/h), unlike a second
// difference of pos.
void check_parametric_consistency(const ParametricPathSpec& path, double w, double tol) {
  const double h = 1e-5;
  const ParametricSample s = path.sample(w);
  const ParametricSample p = path.sample(w + h), m = path.sample(w - h);
  INFO("at w = " << w);
  CHECK(mixed_rel(s.vel.x, (p.pos.x - m.pos.x) / (2 * h)) < tol);
  CHECK(mixed_rel(s.vel.y, (p.pos.y - m.pos.y) / (2 * h)) < tol);
  CHECK(mixed_rel(s.vel.z, (p.pos.z - m.pos.z) / (2 * h)) < tol);
  CHECK(mixed_rel(s.acc.x, (p.vel.x - m.vel.x) / (2 * h)) < tol);
  CHECK(mixed_rel(s.acc.y, (p.vel.y - m.vel.y) / (2 * h)) < tol);
  CHECK(mixed_rel(s.acc.z, (p.vel.z - m.vel.z) / (2 * h)) < tol);
}

}  // namespace

TEST_CASE("circle level set has exact value, gradient, and Hessian", "[paths]") {
  const ImplicitPathSpec circle = gvf::circle_implicit({0.0, 0.0}, 5.0);
  const ImplicitSample on = circle.sample({3.0, 4.0});
  CHECK(on.value == 0.0);
  CHECK(on.grad.x == 6.0);
  CHECK(on.grad.y == 8.0);
  CHECK(on.hess.a11 == 2.0);
  CHECK(on.hess.a12 == 0.0);
  CHECK(on.hess.a22 == 2.0);

  const ImplicitSample off = circle.sample({5.0, 5.0});
  CHECK(off.value == 25.0);
  CHECK(off.grad.x == 10.0);
  CHECK(off.grad.y == 10.0);

  const ImplicitSample shifted = gvf::circle_implicit({2.0, -1.0}, 5.0).sample({5.0, 3.0});
  CHECK(shifted.value == 0.0);
  CHECK(shifted.grad.x == 6.0);
  CHECK(shifted.grad.y == 8.0);
}

TEST_CASE("axis-aligned ellipse level set matches closed form", "[paths]") {
  const ImplicitPathSpec ellipse = gvf::ellipse_implicit({0.0, 0.0}, 2.0, 1.0, 0.0);
  const ImplicitSample a = ellipse.sample({2.0, 0.0});
  CHECK_THAT(a.value, WithinAbs(0.0, 1e-15));
  CHECK_THAT(a.grad.x, WithinAbs(1.0, 1e-15));
  CHECK_THAT(a.grad.y, WithinAbs(0.0, 1e-15));
  CHECK_THAT(a.hess.a11, WithinAbs(0.5, 1e-15));
  CHECK_THAT(a.hess.a22, WithinAbs(2.0, 1e-15));
  const ImplicitSample b = ellipse.sample({0.0, 1.0});
  CHECK_THAT(b.value, WithinAbs(0.0, 1e-15));
  CHECK_THAT(b.grad.y, WithinAbs(2.0, 1e-15));
}

TEST_CASE("rotating an ellipse by a quarter turn swaps its axes", "[paths]") {
  const ImplicitPathSpec rotated = gvf::ellipse_implicit({0.0, 0.0}, 2.0, 1.0, kPi / 2);
  CHECK_THAT(rotated.value({0.0, 2.0}), WithinAbs(0.0, 1e-12));
  CHECK_THAT(rotated.value({1.0, 0.0}), WithinAbs(0.0, 1e-12));
  CHECK_THAT(rotated.value({2.0, 0.0}), WithinAbs(3.0, 1e-12));
}

TEST_CASE("ellipse value and gradient are consistent with its quadratic form", "[paths]") {
  // phi + 1 = 0.5 * d' M d and grad = M d, with M the constant Hessian.
  const ImplicitPathSpec ellipse = gvf::ellipse_implicit({1.0, 2.0}, 3.0, 2.0, 0.3);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)};
    const ImplicitSample s = ellipse.sample(p);
    const Vec2 d = p - Vec2{1.0, 2.0};
    const Vec2 md = s.hess * d;
    CHECK_THAT(0.5 * dot(d, md), WithinAbs(s.value + 1.0, 1e-12));
    CHECK_THAT(s.grad.x, WithinAbs(md.x, 1e-12));
    CHECK_THAT(s.grad.y, WithinAbs(md.y, 1e-12));
  }
  CHECK_THAT(ellipse.value({1.0, 2.0}), WithinAbs(-1.0, 1e-15));
}

TEST_CASE("climbing circle hits its altitude extremes where advertised", "[paths]") {
  const ParametricPathSpec path = gvf::ellipse3d_parametric(0.0, 0.0, 100.0, 40.0, 60.0, 90.0);
  REQUIRE(path.dims == 3);
  // With the low-point angle at 90 degrees, w = 0 sits at the minimum altitude.
  const ParametricSample at0 = path.sample(0.0);
  CHECK_THAT(at0.pos.x, WithinAbs(100.0, 1e-12));
  CHECK_THAT(at0.pos.y, WithinAbs(0.0, 1e-12));
  CHECK_THAT(at0.pos.z, WithinAbs(40.0, 1e-12));
  CHECK_THAT(at0.vel.z, WithinAbs(0.0, 1e-12));
  CHECK_THAT(path.sample(kPi).pos.z, WithinAbs(60.0, 1e-12));
  for (const double w : {0.0, 0.7, 2.0, -1.3, 5.0})
    check_parametric_consistency(path, w, 1e-9);
}

TEST_CASE("flat climbing circle degenerates to constant altitude", "[paths]") {
  const ParametricPathSpec path = gvf::ellipse3d_parametric(10.0, -5.0, 80.0, 50.0, 50.0, 30.0);
  for (const double w : {0.0, 1.0, 2.5, 4.0}) {
    const ParametricSample s = path.sample(w);
    CHECK(s.pos.z == 50.0);
    CHECK(s.vel.z == 0.0);
    CHECK(s.acc.z == 0.0);
  }
}

TEST_CASE("lissajous figure-eight has the expected landmarks", "[paths]") {
  const ParametricPathSpec path = gvf::lissajous3d_parametric(
      {0.0, 0.0, 50.0}, {100.0, 40.0, 0.0}, {1.0, 2.0, 0.0}, {0.0, kPi / 2, 0.0});
  REQUIRE(path.dims == 3);
  const ParametricSample s = path.sample(0.0);
  CHECK_THAT(s.pos.x, WithinAbs(100.0, 1e-12));
  CHECK_THAT(s.pos.y, WithinAbs(0.0, 1e-12));
  CHECK_THAT(s.pos.z, WithinAbs(50.0, 1e-12));
  CHECK_THAT(s.vel.x, WithinAbs(0.0, 1e-12));
  CHECK_THAT(s.vel.y, WithinAbs(-80.0, 1e-12));
  CHECK_THAT(s.acc.x, WithinAbs(-100.0, 1e-12));
  CHECK_THAT(s.acc.y, WithinAbs(0.0, 1e-12));
  for (const double w : {0.3, 1.1, -2.0, 4.4})
    check_parametric_consistency(path, w, 1e-9);
}

TEST_CASE("zero-frequency lissajous axis stays frozen", "[paths]") {
  const ParametricPathSpec path = gvf::lissajous3d_parametric(
      {0.0, 0.0, 50.0}, {100.0, 40.0, 30.0}, {1.0, 2.0, 0.0}, {0.0, 0.0, 1.0});
  const double frozen = 50.0 + 30.0 * std::cos(1.0);
  for (const double w : {0.0, 1.0, 7.0}) {
    const ParametricSample s = path.sample(w);
    CHECK(s.pos.z == frozen);
    CHECK(s.vel.z == 0.0);
    CHECK(s.acc.z == 0.0);
  }
}

TEST_CASE("parametric circle traces the circle with unit-speed derivatives", "[paths]") {
  const ParametricPathSpec path = gvf::circle2d_parametric({5.0, -3.0}, 120.0);
  REQUIRE(path.dims == 2);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const double w = uniform(rng, -10.0, 10.0);
    const ParametricSample s = path.sample(w);
    CHECK_THAT(norm(s.pos - Vec3{5.0, -3.0, 0.0}), WithinAbs(120.0, 1e-9));
    CHECK_THAT(norm(s.vel), WithinAbs(120.0, 1e-9));   // |df/dw| = r
    CHECK_THAT(dot(s.pos - Vec3{5.0, -3.0, 0.0}, s.vel), WithinAbs(0.0, 1e-7));
    CHECK(s.pos.z == 0.0);
    CHECK(s.vel.z == 0.0);
    check_parametric_consistency(path, w, 1e-9);
  }
}

TEST_CASE("compiled circle matches the builtin to tight tolerance", "[paths][oracle]") {
  const ImplicitPathSpec builtin = gvf::circle_implicit({20.0, -10.0}, 120.0);
  const ImplicitPathSpec compiled = gvf::compile_implicit_path(
      "(x - cx)^2 + (y - cy)^2 - r^2", {{"cx", 20.0}, {"cy", -10.0}, {"r", 120.0}});
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{uniform(rng, -300.0, 300.0), uniform(rng, -300.0, 300.0)};
    check_implicit_agreement(builtin, compiled, p, 1e-9);
  }
}

TEST_CASE("compiled rotated ellipse matches the builtin to tight tolerance", "[paths][oracle]") {
  // The builtin carries a hand-derived gradient/Hessian; the compiled form
  // differentiates the raw rotated-frame expression. Agreement cross-checks
  // both derivations.
  const ImplicitPathSpec builtin = gvf::ellipse_implicit({20.0, -10.0}, 140.0, 90.0, 0.5);
  const ImplicitPathSpec compiled = gvf::compile_implicit_path(
      "((x - cx)*cos(rot) + (y - cy)*sin(rot))^2 / a^2"
      " + ((y - cy)*cos(rot) - (x - cx)*sin(rot))^2 / b^2 - 1",
      {{"cx", 20.0}, {"cy", -10.0}, {"a", 140.0}, {"b", 90.0}, {"rot", 0.5}});
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{uniform(rng, -400.0, 400.0), uniform(rng, -400.0, 400.0)};
    check_implicit_agreement(builtin, compiled, p, 1e-9);
  }
}

TEST_CASE("compiled parametric curves match the builtins", "[paths][oracle]") {
  const ParametricPathSpec circle = gvf::circle2d_parametric({5.0, -3.0}, 120.0);
  const ParametricPathSpec circle_dsl = gvf::compile_parametric_path(
      {"cx + r*cos(w)", "cy + r*sin(w)"}, {{"cx", 5.0}, {"cy", -3.0}, {"r", 120.0}});
  const ParametricPathSpec climb = gvf::ellipse3d_parametric(0.0, 0.0, 100.0, 40.0, 60.0, 90.0);
  const ParametricPathSpec climb_dsl = gvf::compile_parametric_path(
      {"r*cos(w)", "r*sin(w)", "0.5*(zh + zl + (zl - zh)*sin(a - w))"},
      {{"r", 100.0}, {"zl", 40.0}, {"zh", 60.0}, {"a", kPi / 2}});
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const double w = uniform(rng, -12.0, 12.0);
    for (const auto* pair : {&circle, &climb}) {
      const auto& dsl = (pair == &circle) ? circle_dsl : climb_dsl;
      const ParametricSample a = pair->sample(w), b = dsl.sample(w);
      INFO("w = " << w);
      CHECK(mixed_rel(a.pos.x, b.pos.x) < 1e-9);
      CHECK(mixed_rel(a.pos.y, b.pos.y) < 1e-9);
      CHECK(mixed_rel(a.pos.z, b.pos.z) < 1e-9);
      CHECK(mixed_rel(a.vel.x, b.vel.x) < 1e-9);
      CHECK(mixed_rel(a.vel.y, b.vel.y) < 1e-9);
      CHECK(mixed_rel(a.vel.z, b.vel.z) < 1e-9);
      CHECK(mixed_rel(a.acc.x, b.acc.x) < 1e-9);
      CHECK(mixed_rel(a.acc.y, b.acc.y) < 1e-9);
      CHECK(mixed_rel(a.acc.z, b.acc.z) < 1e-9);
    }
  }
}

TEST_CASE("offsetting a level set shifts only the value", "[paths]") {
  const ImplicitPathSpec base = gvf::circle_implicit({0.0, 0.0}, 10.0);
  const ImplicitPathSpec shifted = gvf::offset_level_set(base, 44.0);
  const ImplicitSample a = base.sample({12.0, 0.0}), b = shifted.sample({12.0, 0.0});
  CHECK(b.value == a.value - 44.0);
  CHECK(b.grad.x == a.grad.x);
  CHECK(b.hess.a11 == a.hess.a11);
  // (12,0) lies on the offset curve: 144 - 100 - 44 = 0.
  CHECK(b.value == 0.0);
}

TEST_CASE("trajectory registry builds every builtin and rejects the rest", "[paths]") {
  CHECK(gvf::trajectory_names().size() == 5);
  CHECK(std::holds_alternative<ImplicitPathSpec>(gvf::make_trajectory("circle", {0, 0, 50})));
  CHECK(std::holds_alternative<ImplicitPathSpec>(
      gvf::make_trajectory("ellipse", {0, 0, 140, 90, 0.5})));
  CHECK(std::holds_alternative<ParametricPathSpec>(
      gvf::make_trajectory("ellipse3d", {0, 0, 100, 40, 60, 90})));
  CHECK(std::holds_alternative<ParametricPathSpec>(
      gvf::make_trajectory("lissajous3d", {0, 0, 50, 100, 40, 0, 1, 2, 0, 0, 1.57, 0})));
  CHECK(std::holds_alternative<ParametricPathSpec>(
      gvf::make_trajectory("circle2d_param", {0, 0, 120})));

  try {
    gvf::make_trajectory("helix", {1, 2, 3});
    FAIL("expected unknown-trajectory error");
  } catch (const gvf::ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("helix") != std::string::npos);
    for (const auto& name : gvf::trajectory_names())
      CHECK(what.find(name) != std::string::npos);
  }

  try {
    gvf::make_trajectory("circle", {0, 0});
    FAIL("expected parameter-count error");
  } catch (const gvf::ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("takes 3") != std::string::npos);
    CHECK(what.find("got 2") != std::string::npos);
  }
}

TEST_CASE("builtin constructors validate their geometry", "[paths]") {
  CHECK_THROWS_AS(gvf::circle_implicit({0, 0}, 0.0), gvf::ValidationError);
  CHECK_THROWS_AS(gvf::circle_implicit({0, 0}, -5.0), gvf::ValidationError);
  CHECK_THROWS_AS(gvf::ellipse_implicit({0, 0}, 0.0, 1.0, 0.0), gvf::ValidationError);
  CHECK_THROWS_AS(gvf::ellipse3d_parametric(0, 0, 100, 60, 40, 0), gvf::ValidationError);
  CHECK_THROWS_AS(
      gvf::lissajous3d_parametric({0, 0, 0}, {-1, 0, 0}, {1, 1, 1}, {0, 0, 0}),
      gvf::ValidationError);
}

TEST_CASE("path files parse params, comments, and expression lines", "[paths]") {
  const gvf::PathFile file = gvf::parse_path_file_text(
      "# squircle, quartic level set\n"
      "\n"
      "params: a=120 b=120\n"
      "(x/a)^4 + (y/b)^4 - 1   # the curve itself\n",
      "inline");
  CHECK(file.params.size() == 2);
  CHECK(file.params.at("a") == 120.0);
  REQUIRE(file.expressions.size() == 1);

  const gvf::PathSpec spec = gvf::compile_path_file(file);
  REQUIRE(std::holds_alternative<ImplicitPathSpec>(spec));
  const auto& path = std::get<ImplicitPathSpec>(spec);
  CHECK_THAT(path.value({120.0, 0.0}), WithinAbs(0.0, 1e-15));
  CHECK_THAT(path.grad({120.0, 0.0}).x, WithinAbs(1.0 / 30.0, 1e-15));
  CHECK_THAT(path.grad({120.0, 0.0}).y, WithinAbs(0.0, 1e-15));
}

TEST_CASE("two or three expression lines compile to a parametric path", "[paths]") {
  const gvf::PathSpec two = gvf::compile_path_file(
      gvf::parse_path_file_text("params: r=50\nr*cos(w)\nr*sin(w)\n", "inline"));
  REQUIRE(std::holds_alternative<ParametricPathSpec>(two));
  CHECK(std::get<ParametricPathSpec>(two).dims == 2);

  const gvf::PathSpec three = gvf::compile_path_file(
      gvf::parse_path_file_text("params: r=50\nr*cos(w)\nr*sin(w)\n100 + 0*w\n", "inline"));
  REQUIRE(std::holds_alternative<ParametricPathSpec>(three));
  const auto& path = std::get<ParametricPathSpec>(three);
  CHECK(path.dims == 3);
  const ParametricSample s = path.sample(0.4);
  CHECK(s.pos.z == 100.0);
  CHECK(s.vel.z == 0.0);
}

TEST_CASE("path file errors name the file and line", "[paths]") {
  auto message_of = [](const char* text) {
    try {
      gvf::parse_path_file_text(text, "wave.txt");
    } catch (const gvf::ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of("x^2\nparams: a=1\n").find("wave.txt:2") != std::string::npos);
  CHECK(message_of("params: a=\nx^2\n").find("wave.txt:1") != std::string::npos);
  CHECK(message_of("params: =1\nx^2\n").find("wave.txt:1") != std::string::npos);
  CHECK(message_of("params: a=two\nx^2\n").find("malformed") != std::string::npos);
  CHECK(message_of("# only comments\n").find("no expressions") != std::string::npos);
  CHECK(message_of("a\nb\nc\nd\n").find("too many expression lines") != std::string::npos);
  CHECK_THROWS_AS(gvf::load_path_file("/nonexistent/path.txt"), gvf::ValidationError);
}

TEST_CASE("unbound path-file parameters fail at compile time", "[paths]") {
  const gvf::PathFile file = gvf::parse_path_file_text("x^2 + y^2 - r^2\n", "inline");
  CHECK_THROWS_AS(gvf::compile_path_file(file), gvf::ValidationError);
}
