#include "dtea/control.hpp"

#include <cmath>

namespace dtea {

double p_position(double target, double motor_angle, double gain) {
  return gain * (target - motor_angle);
}

double torque_to_current(double tau, double torque_constant) { return tau / torque_constant; }

double sinusoid_target(double t, double amplitude, double frequency) {
  return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
}

double TorqueCycleProfile::operator()(double t) const {
  if (!(t > 0.0) || t >= duration()) return 0.0;
  const double segment = peak / ramp_rate;
  const double in_cycle = std::fmod(t, cycle_duration());
  const int index = static_cast<int>(in_cycle / segment);
  const double u = (in_cycle - index * segment) / segment;
  switch (index) {
    case 0: return peak * u;            // 0 -> +peak
    case 1: return peak * (1.0 - u);    // +peak -> 0
    case 2: return -peak * u;           // 0 -> -peak
    default: return -peak * (1.0 - u);  // -peak -> 0
  }
}

}  // namespace dtea
