#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "dtea/plant.hpp"
#include "oracles.hpp"

using namespace dtea;

namespace {

ActuatorParams undamped() {
  ActuatorParams p;
  p.hub_stiffness = 5.57;
  return p;
}

LoadModel weightless() {
  LoadModel l;
  l.mass = 0.0;
  return l;
}

const HubModel kHub = HubModel::linearized(HubGeometry{}, 5.57);

}  // namespace

TEST_CASE("gravity torque with zero at horizontal") {
  const LoadModel load;
  CHECK(gravity_torque(0.0, load) == doctest::Approx(2.347).epsilon(1e-3));
  CHECK(gravity_torque(std::numbers::pi / 2, load) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gravity_torque(std::numbers::pi, load) == doctest::Approx(-0.920 * 9.81 * 0.26));
  CHECK(gravity_torque(0.0, load) == doctest::Approx(load.mass * load.gravity * load.radius));
}

TEST_CASE("series accelerations") {
  const auto p = undamped();
  SeaState s;
  auto a = sea_accelerations(s, 0.0, 0.0, p, kHub);
  CHECK(a.motor == 0.0);
  CHECK(a.output == 0.0);

  s.motor_angle = 0.3;
  s.output_angle = 0.15;
  s.spring_offset = 0.05;  // deflection 0.1 rad
  a = sea_accelerations(s, 0.0, 0.0, p, kHub);
  CHECK(a.motor == doctest::Approx(-0.557 / p.motor_inertia));
  CHECK(a.output == doctest::Approx(0.557 / p.output_inertia));

  SUBCASE("at rest the motor carries the whole load") {
    SeaState rest;
    const double load = 2.347;
    rest.motor_angle = load / 5.57;  // spring carries the load
    const auto b = sea_accelerations(rest, load, load, p, kHub);
    CHECK(b.motor == doctest::Approx(0.0));
    CHECK(b.output == doctest::Approx(0.0));
  }
}

TEST_CASE("series damping and friction act against motion") {
  auto p = undamped();
  p.motor_damping = 0.2;
  p.output_damping = 0.3;
  p.coulomb_sea = 0.1;
  SeaState s;
  s.motor_velocity = 2.0;
  s.output_velocity = -1.0;
  const auto a = sea_accelerations(s, 0.0, 0.0, p, kHub);
  CHECK(a.motor == doctest::Approx((-0.4 - 0.1 * std::tanh(2.0 / 1e-3)) / p.motor_inertia));
  CHECK(a.output == doctest::Approx(0.3 / p.output_inertia));
}

TEST_CASE("parallel acceleration") {
  const auto p = undamped();
  PeaState s;
  s.angle = 0.2;
  s.anchor = 0.2;
  CHECK(pea_acceleration(s, 1.5, 1.5, p, kHub) == doctest::Approx(0.0));

  s.anchor = 0.0;
  const double tau_ext = 2.0;
  CHECK(pea_acceleration(s, tau_ext + 5.57 * 0.2, tau_ext, p, kHub) == doctest::Approx(0.0));

  // Spring carries gravity: no motor effort needed at rest.
  s.anchor = s.angle + tau_ext / 5.57;
  CHECK(pea_acceleration(s, 0.0, tau_ext, p, kHub) == doctest::Approx(0.0).epsilon(1e-12));

  s = PeaState{};
  CHECK(pea_acceleration(s, 1.0, 0.0, p, kHub) ==
        doctest::Approx(1.0 / (p.motor_inertia + p.output_inertia)));
}

TEST_CASE("freewheel decouples motor and output") {
  const auto p = undamped();
  TransitionState s;
  auto a = freewheel_accelerations(s, 0.0, 0.0, p);
  CHECK(a.motor == 0.0);
  CHECK(a.output == 0.0);
  a = freewheel_accelerations(s, 0.0, 2.347, p);
  CHECK(a.output == doctest::Approx(-2.347 / p.output_inertia));
  CHECK(a.motor == 0.0);
  a = freewheel_accelerations(s, 1.0, 0.0, p);
  CHECK(a.motor == doctest::Approx(1.0 / p.motor_inertia));
  CHECK(a.output == 0.0);
}

TEST_CASE("regularized Coulomb friction") {
  CHECK(coulomb_friction(0.0, 0.1, 1e-3) == 0.0);
  CHECK(coulomb_friction(1.0, 0.1, 1e-3) == doctest::Approx(0.1));
  CHECK(coulomb_friction(1e-3, 0.1, 1e-3) == doctest::Approx(0.0762).epsilon(1e-3));
  CHECK(coulomb_friction(-0.5, 0.1, 1e-3) == -coulomb_friction(0.5, 0.1, 1e-3));
  CHECK(std::abs(coulomb_friction(0.002, 0.1, 1e-3)) < 0.1);
}

TEST_CASE("clock time is an integer multiple of dt") {
  SimClock c;
  for (int i = 0; i < 100000; ++i) c = c.next();
  CHECK(c.step_index == 100000);
  CHECK(c.time() == 100000 * (1.0 / 8000.0));
}

TEST_CASE("equilibrium is a fixed point") {
  const auto p = undamped();
  const auto load = weightless();
  SimClock clock;
  PlantState s = SeaState{};
  for (int i = 0; i < 100; ++i) {
    auto r = step(s, clock, 0.0, p, kHub, load);
    s = r.state;
    clock = r.clock;
  }
  const auto& sea = std::get<SeaState>(s);
  CHECK(sea.motor_angle == 0.0);
  CHECK(sea.output_angle == 0.0);
  CHECK(sea.motor_velocity == 0.0);
  CHECK(clock.step_index == 100);
}

TEST_CASE("commanded torque is clamped to the limit") {
  auto p = undamped();
  p.torque_limit = 3.0;
  SimClock clock;
  const auto r = step(PeaState{}, clock, 10.0, p, kHub, LoadModel{});
  CHECK(r.applied_torque == 3.0);
  CHECK(saturate(-7.0, p) == -3.0);
  CHECK(saturate(1.0, p) == 1.0);
}

TEST_CASE("parallel mode keeps motor and output angles identical") {
  const auto p = undamped();
  PlantState s = PeaState{0.1, 0.0, 0.0};
  SimClock clock;
  for (int i = 0; i < 1000; ++i) {
    auto r = step(s, clock, 0.5, p, kHub, LoadModel{});
    s = r.state;
    clock = r.clock;
    REQUIRE(motor_angle(s) == output_angle(s));
    REQUIRE(motor_velocity(s) == output_velocity(s));
  }
}

TEST_CASE("non-finite input is a simulation error") {
  const auto p = undamped();
  SimClock clock;
  CHECK_THROWS_AS(step(SeaState{}, clock, std::numeric_limits<double>::quiet_NaN(), p, kHub, LoadModel{}),
                  SimulationError);
  SeaState bad;
  bad.motor_velocity = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(step(bad, clock, 0.0, p, kHub, LoadModel{}), SimulationError);
}

TEST_CASE("undamped free oscillation conserves energy and rings at the two-mass frequency") {
  const auto p = undamped();
  const auto load = weightless();
  SeaState init;
  init.motor_angle = 0.05;
  PlantState s = init;
  SimClock clock;
  auto energy = [&](const PlantState& st) {
    const auto& v = std::get<SeaState>(st);
    return oracle::two_mass_energy(p.motor_inertia, v.motor_velocity, p.output_inertia,
                                   v.output_velocity, 5.57, v.motor_angle - v.output_angle);
  };
  const double e0 = energy(s);
  const int steps = static_cast<int>(10.0 / p.dt);
  std::vector<double> deflection;
  deflection.reserve(steps + 1);
  double worst = 0.0;
  for (int i = 0; i < steps; ++i) {
    deflection.push_back(motor_angle(s) - output_angle(s));
    auto r = step(s, clock, 0.0, p, kHub, load);
    s = r.state;
    clock = r.clock;
    worst = std::max(worst, std::abs(energy(s) - e0) / e0);
  }
  CHECK(worst < 1e-6);

  const auto t = oracle::crossing_times(deflection, p.dt);
  REQUIRE(t.size() > 10);
  const double measured = (t.size() - 1) / (2.0 * (t.back() - t.front()));
  const double expected = oracle::free_free_hz(p.motor_inertia, p.output_inertia, 5.57);
  CHECK(std::abs(measured - expected) / expected < 0.01);
}

TEST_CASE("locked fixture restoring torque") {
  auto p = undamped();
  p.structural_stiffness = 2.97;
  CHECK(locked_restoring_torque(0.1, Mode::sea, p, kHub) == doctest::Approx(0.557));
  CHECK(locked_restoring_torque(0.1, Mode::pea, p, kHub) == doctest::Approx(0.854));
}

TEST_CASE("state accessors by mode") {
  const PlantState sea = SeaState{0.2, 1.0, 0.1, -1.0, 0.05};
  CHECK(mode_tag(sea) == ModeTag::sea);
  CHECK(spring_torque(sea, kHub) == doctest::Approx(5.57 * 0.05));
  const PlantState trans = TransitionState{0.2, 1.0, 0.1, -1.0, Mode::pea, 0.01};
  CHECK_FALSE(is_engaged(trans));
  CHECK(spring_torque(trans, kHub) == 0.0);
  CHECK(std::string(to_string(ModeTag::transition)) == "TRANS");
  const PlantState pea = PeaState{0.3, 0.5, 0.1};
  CHECK(spring_torque(pea, kHub) == doctest::Approx(5.57 * 0.2));
  CHECK(output_angle(pea) == 0.3);
}
