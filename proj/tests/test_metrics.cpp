#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dtea/metrics.hpp"
#include "oracles.hpp"

using namespace dtea;

TEST_CASE("least-squares line") {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = -10; i <= 10; ++i) {
    x.push_back(0.01 * i);
    y.push_back(5.57 * 0.01 * i);
  }
  auto fit = linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(5.57));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0));
  CHECK(fit.slope_stderr == doctest::Approx(0.0).scale(1.0));

  std::vector<double> flat(x.size(), 3.0);
  CHECK(linear_fit(x, flat).slope == doctest::Approx(0.0).scale(1.0));

  const std::vector<double> same{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(linear_fit(same, same), std::invalid_argument);
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("symmetric perturbations about the mean abscissa leave the slope alone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double slope = u(rng);
  const double icpt = u(rng);
  std::vector<double> x;
  std::vector<double> y;
  for (int i = -20; i <= 20; ++i) x.push_back(0.05 * i);
  for (std::size_t i = 0; i < x.size(); ++i) {
    // Pair x and -x with the same offset: the perturbation is even in x.
    const double eps = 0.01 * std::cos(7.0 * std::abs(x[i]));
    y.push_back(slope * x[i] + icpt + eps);
  }
  CHECK(linear_fit(x, y).slope == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("shoelace loop area") {
  const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(hysteresis_area(square) == doctest::Approx(1.0));
  const std::vector<Point> closed{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  CHECK(hysteresis_area(closed) == doctest::Approx(1.0));
  const std::vector<Point> retraced{{0, 0}, {1, 2}, {2, 4}, {1, 2}, {0, 0}};
  CHECK(hysteresis_area(retraced) == doctest::Approx(0.0).scale(1.0));
  const std::vector<Point> clockwise{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK(hysteresis_area(clockwise) == doctest::Approx(1.0));
  CHECK_THROWS_AS(hysteresis_area(std::vector<Point>{{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("root mean square") {
  CHECK(rms(std::vector<double>(5, -2.5)) == doctest::Approx(2.5));
  std::vector<double> sine;
  for (int i = 0; i < 4000; ++i) sine.push_back(std::sin(2 * std::numbers::pi * i / 1000.0));
  CHECK(std::abs(rms(sine) - 1.0 / std::sqrt(2.0)) < 1e-3);
  CHECK(rms(std::vector<double>{3.0, 4.0}) == doctest::Approx(3.5355).epsilon(1e-4));
  CHECK_THROWS_AS(rms(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("settling time") {
  const double period = 1e-3;
  const double band = 0.01;

  SUBCASE("inside the band throughout") {
    const std::vector<double> quiet(100, 0.005);
    CHECK(settling_time(quiet, period, 0.0, band) == 0.0);
  }
  SUBCASE("single exponential decay crosses at the analytic time") {
    const double a = 0.1;
    const double tau = 0.2;
    std::vector<double> x;
    for (int i = 0; i < 3000; ++i) x.push_back(a * std::exp(-i * period / tau));
    const auto t = settling_time(x, period, 0.0, band);
    REQUIRE(t);
    const double expected_ms = oracle::exponential_crossing(a, tau, band) * 1000.0;
    CHECK(std::abs(*t - expected_ms) <= period * 1000.0);
  }
  SUBCASE("re-exiting the band moves the settling time") {
    std::vector<double> x(100, 0.0);
    x[5] = 0.02;
    x[40] = -0.02;
    CHECK(settling_time(x, period, 0.0, band) == doctest::Approx(41.0));
  }
  SUBCASE("never settling") {
    std::vector<double> x(10, 0.0);
    x.back() = 0.5;
    CHECK_FALSE(settling_time(x, period, 0.0, band));
  }
}

TEST_CASE("peak deflection in degrees") {
  const std::vector<double> flat(20, 0.3);
  CHECK(peak_deflection(flat, 0.3) == 0.0);
  std::vector<double> spike(20, 0.0);
  spike[7] = 0.1;
  CHECK(peak_deflection(spike, 0.0) == doctest::Approx(5.73).epsilon(1e-3));
  spike[9] = -0.2;
  CHECK(peak_deflection(spike, 0.0) == doctest::Approx(11.459).epsilon(1e-3));
}

TEST_CASE("zero crossings about a reference") {
  const std::vector<double> x{1.0, 1.5, 0.5, 0.9, 1.2, 1.0, 0.8};
  const auto c = zero_crossings(x, 1.0);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 2);
  CHECK(c[1] == 4);
  CHECK(c[2] == 6);
  CHECK(zero_crossings(std::vector<double>(5, 2.0), 1.0).empty());
}

TEST_CASE("metrics are pure") {
  std::vector<double> x;
  for (int i = 0; i < 500; ++i) x.push_back(0.02 * std::exp(-i / 80.0) * std::cos(i / 9.0));
  const auto a = settling_time(x, 1e-3, 0.0, 0.001);
  const auto b = settling_time(x, 1e-3, 0.0, 0.001);
  CHECK(a == b);
  CHECK(peak_deflection(x, 0.0) == peak_deflection(x, 0.0));
  CHECK(zero_crossings(x, 0.0) == zero_crossings(x, 0.0));
}
