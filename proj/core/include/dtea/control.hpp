#pragma once

#include <numbers>

namespace dtea {

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

enum class ControllerKind { proportional_position, torque_profile };

struct ControllerConfig {
  ControllerKind kind = ControllerKind::proportional_position;
  double gain = 40.0;  // Nm/rad
};

/// gain * (target - motor_angle). Reads the motor angle only; saturation is
/// applied by the plant.
double p_position(double target, double motor_angle, double gain);

/// q-axis current for an ideal torque source.
double torque_to_current(double tau, double torque_constant);

/// Tracking reference: amplitude * sin(2 pi f t), default 20 deg at 1 Hz.
double sinusoid_target(double t, double amplitude = deg_to_rad(20.0), double frequency = 1.0);

/// Piecewise-linear loading cycle 0 -> +peak -> 0 -> -peak -> 0, repeated.
struct TorqueCycleProfile {
  double ramp_rate = 0.2;  // Nm/s
  double peak = 1.0;       // Nm
  int cycles = 3;

  double cycle_duration() const { return 4.0 * peak / ramp_rate; }
  double duration() const { return cycles * cycle_duration(); }

  /// Command at time t; zero outside [0, duration()].
  double operator()(double t) const;
};

}  // namespace dtea
