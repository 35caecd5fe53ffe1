// Tests for the vehicle model: RK4 accuracy and convergence order against
// closed-form trajectories, wind determinism, the exact vertical-lag update,
// and actuator/validation behavior.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gvf/vehicle.hpp"

#include "analytic_reference.hpp"

namespace {

using Catch::Matchers::WithinAbs;
using gvf::ActuatorLimits;
using gvf::GuidanceCommand;
using gvf::kPi;
using gvf::Vec2;
using gvf::VehicleState;
using gvf::WindModel;

using analytic::analytic_position;
using analytic::simulate_to;

}  // namespace

TEST_CASE("straight flight in still air is exact", "[vehicle]") {
  VehicleState s;
  s.airspeed = 10.0;
  const WindModel calm = WindModel::make({0.0, 0.0});
  s = gvf::step_vehicle(s, GuidanceCommand{}, calm, ActuatorLimits{}, 0.02);
  CHECK_THAT(s.position.x, WithinAbs(0.2, 1e-15));
  CHECK(s.position.y == 0.0);
  CHECK(s.heading == 0.0);
  CHECK(s.t == 0.02);
}

TEST_CASE("constant-rate turn matches the analytic circle", "[vehicle][oracle]") {
  VehicleState s;
  s.position = {55.0, 0.0, 0.0};
  s.heading = kPi / 2;
  s.airspeed = 11.0;
  const WindModel calm = WindModel::make({0.0, 0.0});
  const double omega = 0.2;  // radius v/omega = 55 about the origin

  const Vec2 end = simulate_to(s, omega, 10.0, 0.02, calm);
  const Vec2 ref = analytic_position({55.0, 0.0}, 11.0, kPi / 2, omega, 10.0, calm);
  CHECK_THAT(norm(end - ref), WithinAbs(0.0, 1e-8));

  // Radius invariant over a full lap.
  VehicleState lap = s;
  GuidanceCommand cmd;
  cmd.heading_rate = omega;
  double worst = 0.0;
  const int steps = static_cast<int>(std::round(2.0 * kPi / omega / 0.02));
  for (int i = 0; i < steps; ++i) {
    lap = gvf::step_vehicle(lap, cmd, calm, ActuatorLimits{}, 0.02);
    worst = std::max(worst, std::abs(norm(lap.position.xy()) - 55.0));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("halving the step shrinks the error sixteenfold", "[vehicle][oracle]") {
  // Fourth-order convergence on a turning trajectory through a rotating gust;
  // the horizon and rates are chosen so truncation dominates roundoff.
  VehicleState s;
  s.position = {0.0, 0.0, 0.0};
  s.heading = 0.3;
  s.airspeed = 11.0;
  const WindModel wind = WindModel::make({3.0, 1.0}, 2.0, 5.0, 4242);
  const double omega = 0.5, t_end = 8.0;
  const Vec2 ref = analytic_position({0.0, 0.0}, 11.0, 0.3, omega, t_end, wind);

  const double err_coarse = norm(simulate_to(s, omega, t_end, 0.04, wind) - ref);
  const double err_fine = norm(simulate_to(s, omega, t_end, 0.02, wind) - ref);
  REQUIRE(err_fine > 1e-12);  // still truncation-dominated
  const double ratio = err_coarse / err_fine;
  INFO("coarse " << err_coarse << ", fine " << err_fine << ", ratio " << ratio);
  CHECK(ratio > 16.0 * 0.7);
  CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("crosswind flight crabs by the wind-triangle angle", "[vehicle]") {
  // Heading offset from the course by asin(wind/airspeed) cancels a direct
  // crosswind: the ground track runs due north while the nose points west of
  // north.
  const double crab = std::asin(5.0 / 11.0);
  VehicleState s;
  s.heading = kPi / 2 + crab;
  s.airspeed = 11.0;
  const WindModel wind = WindModel::make({5.0, 0.0});
  const auto track = gvf::ground_course_and_speed(s, wind, 0.0);
  CHECK_THAT(track.course, WithinAbs(kPi / 2, 1e-12));
  CHECK_THAT(track.speed, WithinAbs(std::sqrt(121.0 - 25.0), 1e-12));
  CHECK_THAT(s.heading - track.course, WithinAbs(crab, 1e-12));
}

TEST_CASE("ground velocity minus wind recovers the airspeed", "[vehicle]") {
  const WindModel wind = WindModel::make({4.0, -2.0}, 1.5, 45.0, 9);
  VehicleState s;
  s.airspeed = 11.0;
  s.heading = 0.37;
  GuidanceCommand cmd;
  cmd.heading_rate = 0.3;
  cmd.vz = 1.0;
  for (int i = 0; i < 200; ++i) {
    const auto track = gvf::ground_course_and_speed(s, wind, s.t);
    const Vec2 ground{track.speed * std::cos(track.course),
                      track.speed * std::sin(track.course)};
    const Vec2 air = ground - gvf::wind_at(wind, s.t);
    CHECK_THAT(norm(air), WithinAbs(11.0, 1e-9));
    s = gvf::step_vehicle(s, cmd, wind, ActuatorLimits{}, 0.02);
  }
}

TEST_CASE("wind phases are deterministic in the seed", "[vehicle]") {
  const WindModel a = WindModel::make({1.0, 2.0}, 1.5, 30.0, 77);
  const WindModel b = WindModel::make({1.0, 2.0}, 1.5, 30.0, 77);
  CHECK(a.phase1 == b.phase1);
  CHECK(a.phase2 == b.phase2);
  for (const double t : {0.0, 1.7, 400.0}) {
    const Vec2 wa = gvf::wind_at(a, t), wb = gvf::wind_at(b, t);
    CHECK(wa.x == wb.x);
    CHECK(wa.y == wb.y);
  }
  const WindModel c = WindModel::make({1.0, 2.0}, 1.5, 30.0, 78);
  CHECK(a.phase1 != c.phase1);

  const WindModel calm = WindModel::make({1.0, 2.0});
  for (const double t : {0.0, 3.3}) {
    CHECK(gvf::wind_at(calm, t).x == 1.0);
    CHECK(gvf::wind_at(calm, t).y == 2.0);
  }
}

TEST_CASE("wind model validates its shape parameters", "[vehicle]") {
  CHECK_THROWS_AS(WindModel::make({0, 0}, -1.0), gvf::ValidationError);
  CHECK_THROWS_AS(WindModel::make({0, 0}, 1.0, 0.0), gvf::ValidationError);
  CHECK_NOTHROW(WindModel::make({0, 0}, 0.0, 0.0));  // period unused when calm
}

TEST_CASE("vertical channel follows the exact first-order lag", "[vehicle]") {
  const ActuatorLimits limits;  // vz_max 3, time constant 1
  const WindModel calm = WindModel::make({0.0, 0.0});
  GuidanceCommand cmd;
  cmd.vz = 2.0;
  VehicleState s;
  s.position = {0.0, 0.0, 50.0};
  s.airspeed = 11.0;
  const double dt = 0.02;
  for (int n = 1; n <= 300; ++n) {
    s = gvf::step_vehicle(s, cmd, calm, limits, dt);
    const double t = n * dt;
    const double vz_ref = 2.0 * (1.0 - std::exp(-t));
    const double z_ref = 50.0 + 2.0 * t - 2.0 * (1.0 - std::exp(-t));
    REQUIRE_THAT(s.vertical_speed, WithinAbs(vz_ref, 1e-12));
    REQUIRE_THAT(s.position.z, WithinAbs(z_ref, 1e-12));
  }
}

TEST_CASE("vertical-speed command saturates at the actuator limit", "[vehicle]") {
  const WindModel calm = WindModel::make({0.0, 0.0});
  GuidanceCommand cmd;
  cmd.vz = 10.0;
  VehicleState s;
  s.airspeed = 11.0;
  for (int i = 0; i < 600; ++i) s = gvf::step_vehicle(s, cmd, calm, ActuatorLimits{}, 0.02);
  // The first-order lag chases the clamped setpoint: 3 (1 - e^-12), not the
  // commanded 10 m/s.
  CHECK_THAT(s.vertical_speed, WithinAbs(3.0 * (1.0 - std::exp(-12.0)), 1e-12));
  CHECK(s.vertical_speed < 3.0);
}

TEST_CASE("heading-rate command saturates and heading stays wrapped", "[vehicle]") {
  const WindModel calm = WindModel::make({0.0, 0.0});
  const ActuatorLimits limits;
  GuidanceCommand cmd;
  cmd.heading_rate = 10.0;
  VehicleState s;
  s.heading = kPi - 0.01;
  s.airspeed = 11.0;
  s = gvf::step_vehicle(s, cmd, calm, limits, 0.1);
  CHECK_THAT(s.heading, WithinAbs(gvf::wrap_to_pi(kPi - 0.01 + limits.omega_max * 0.1), 1e-15));
  CHECK(s.heading <= kPi);
  CHECK(s.heading > -kPi);
  CHECK(s.heading < 0.0);  // wrapped around the seam
}

TEST_CASE("step rejects out-of-range time steps", "[vehicle]") {
  const WindModel calm = WindModel::make({0.0, 0.0});
  VehicleState s;
  s.airspeed = 11.0;
  for (const double dt : {0.0, -0.01, 0.11, 1.0})
    CHECK_THROWS_AS(gvf::step_vehicle(s, GuidanceCommand{}, calm, ActuatorLimits{}, dt),
                    gvf::ValidationError);
  CHECK_NOTHROW(gvf::step_vehicle(s, GuidanceCommand{}, calm, ActuatorLimits{}, 0.1));
}

TEST_CASE("zero ground speed has no course", "[vehicle]") {
  VehicleState s;
  s.airspeed = 11.0;
  s.heading = 0.0;
  const WindModel head = WindModel::make({-11.0, 0.0});
  CHECK_THROWS_AS(gvf::ground_course_and_speed(s, head, 0.0), gvf::ZeroGroundSpeedError);
}

TEST_CASE("actuator limits derive the turn rate from the bank limit", "[vehicle]") {
  const ActuatorLimits l = ActuatorLimits::for_airspeed(11.0);
  CHECK_THAT(l.omega_max, WithinAbs(9.81 * std::tan(0.75) / 11.0, 1e-12));
  CHECK(l.roll_max == 0.75);
  CHECK_THROWS_AS(ActuatorLimits::for_airspeed(0.0), gvf::ValidationError);
  CHECK_THROWS_AS(ActuatorLimits::for_airspeed(11.0, 1.6), gvf::ValidationError);
  CHECK_THROWS_AS(ActuatorLimits::for_airspeed(11.0, 0.75, 0.0), gvf::ValidationError);
  CHECK_THROWS_AS(ActuatorLimits::for_airspeed(11.0, 0.75, 3.0, 0.0), gvf::ValidationError);
}
