#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dtea/spring_hub.hpp"
#include "oracles.hpp"

using namespace dtea;
using std::numbers::pi;

TEST_CASE("hook distance over the sweep") {
  const auto hub = HubModel::nonlinear(HubGeometry{});
  CHECK(hub.spring_length(0.0) == doctest::Approx(12.55).epsilon(1e-12));
  CHECK(hub.spring_length(pi) == doctest::Approx(63.19).epsilon(1e-12));
  CHECK(hub.spring_length(pi / 2) == doctest::Approx(std::hypot(25.32, 37.87)));
  CHECK(hub.spring_length(pi / 2) == doctest::Approx(45.55).epsilon(1e-3));
  double prev = hub.spring_length(0.0);
  for (int i = 1; i <= 200; ++i) {
    const double b = pi * i / 200.0;
    CHECK(hub.spring_length(-b) == hub.spring_length(b));
    const double now = hub.spring_length(b);
    CHECK(now > prev);
    prev = now;
  }
}

TEST_CASE("effective length includes the assembly offset") {
  const auto hub = HubModel::nonlinear(HubGeometry{});
  CHECK(hub.effective_length(0.0) == doctest::Approx(14.55).epsilon(1e-14));
  CHECK(hub.preload_offset() == doctest::Approx(2.00));
  CHECK(hub.effective_length(pi) == doctest::Approx(65.19));

  HubGeometry flush;
  flush.preload_extension = 0.0;
  flush.free_length = flush.outer_radius - flush.inner_radius;
  const auto bare = HubModel::nonlinear(flush);
  for (double b : {0.0, 0.3, 1.2, 3.0}) CHECK(bare.effective_length(b) == doctest::Approx(bare.spring_length(b)));
}

TEST_CASE("linearized stiffness of the reference geometry") {
  const auto hub = HubModel::nonlinear(HubGeometry{});
  const double k = hub.linearized_stiffness();
  CHECK(k == doctest::Approx(5.86).epsilon(0.002));
  CHECK(std::abs(k - 5.8) / 5.8 <= 0.02);
}

TEST_CASE("stiffness approaches 4 k r1 r2 as the installed length grows") {
  HubGeometry g;
  g.preload_extension = 1e9;
  const double asymptote = 4.0 * 12.701e3 * 25.32e-3 * 37.87e-3;
  CHECK(HubModel::nonlinear(g).linearized_stiffness() == doctest::Approx(asymptote).epsilon(1e-6));
}

TEST_CASE("slack springs have no stiffness") {
  HubGeometry g;
  g.preload_extension = 0.0;
  CHECK_THROWS_AS(HubModel::nonlinear(g).linearized_stiffness(), ConfigError);
  CHECK_THROWS_AS(HubModel::linearized(g), ConfigError);
}

TEST_CASE("literal hook-distance preload gives the lower stiffness") {
  HubGeometry g;
  g.preload_reference = PreloadReference::hook_distance;
  const auto hub = HubModel::nonlinear(g);
  CHECK(hub.installed_length() == doctest::Approx(14.30));
  CHECK(hub.linearized_stiffness() == doctest::Approx(5.11).epsilon(0.005));
}

TEST_CASE("hub torque is odd and zero at rest") {
  const auto nonlinear = HubModel::nonlinear(HubGeometry{});
  const auto linear = HubModel::linearized(HubGeometry{});
  for (const auto* hub : {&nonlinear, &linear}) {
    CHECK(hub->torque(0.0) == 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double b = pi * i / 100.0;
      CHECK(hub->torque(-b) == -hub->torque(b));
    }
  }
}

TEST_CASE("small-angle torque follows the linear stiffness") {
  const auto hub = HubModel::nonlinear(HubGeometry{});
  const double k = hub.linearized_stiffness();
  CHECK(hub.torque(0.01) == doctest::Approx(k * 0.01).epsilon(0.01));
  const double h = 1e-6;
  const double slope = (hub.torque(h) - hub.torque(-h)) / (2 * h);
  CHECK(std::abs(slope - k) / k < 1e-4);
}

TEST_CASE("linearized mode is exactly proportional") {
  const auto hub = HubModel::linearized(HubGeometry{}, 5.57);
  CHECK(hub.torque(0.1) == 5.57 * 0.1);
  CHECK(hub.stiffness() == 5.57);
  CHECK(hub.mode() == HubMode::linearized);
}

TEST_CASE("closed form agrees with per-spring force resolution") {
  const auto hub = HubModel::nonlinear(HubGeometry{});
  const oracle::HubInputs in;
  CHECK(hub.torque(0.5) == doctest::Approx(oracle::hub_torque_by_forces(in, 0.5)).epsilon(1e-12));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> beta(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double b = beta(rng);
    worst = std::max(worst, std::abs(hub.torque(b) - oracle::hub_torque_by_forces(in, b)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("preload force per spring") {
  CHECK(HubModel::nonlinear(HubGeometry{}).preload_force() == doctest::Approx(22.2).epsilon(0.002));
  HubGeometry g;
  g.preload_extension = 0.0;
  CHECK(HubModel::linearized(g, 1.0).preload_force() == 0.0);
  g.spring_rate = 10.0;
  g.preload_extension = 1.0;
  CHECK(HubModel::nonlinear(g).preload_force() == doctest::Approx(10.0));
}
