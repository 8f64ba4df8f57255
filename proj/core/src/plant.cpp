#include "dtea/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dtea {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool all_finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(std::initializer_list<double> values, const char* where) {
  if (!all_finite(values)) throw SimulationError(std::string("non-finite value in ") + where);
}

// Classical RK4 on a fixed-size state vector.
template <std::size_t N, class Deriv>
std::array<double, N> rk4(const std::array<double, N>& y, double h, Deriv&& f) {
  auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const auto k1 = f(y);
  const auto k2 = f(axpy(y, 0.5 * h, k1));
  const auto k3 = f(axpy(y, 0.5 * h, k2));
  const auto k4 = f(axpy(y, h, k3));
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// RK4 repeated over `n` equal substeps of h.
template <std::size_t N, class Deriv>
std::array<double, N> rk4_substeps(std::array<double, N> y, double h, int n, Deriv&& f) {
  const double sub = h / n;
  for (int i = 0; i < n; ++i) y = rk4(y, sub, f);
  return y;
}

// Near zero velocity the tanh friction behaves like a damper of rate
// tau_c / omega_eps, which on the motor inertia alone is far stiffer than the
// 8 kHz step. Left alone, RK4 falls into a step-to-step velocity chatter
// instead of coming to rest, so split the step until that rate times the
// substep is at most 2.
int friction_substeps(double tau_c, double inertia, double damping, const ActuatorParams& p,
                      double h) {
  const double rate = (tau_c / p.friction_velocity + damping) / inertia;
  return std::max(1, static_cast<int>(std::ceil(rate * h / 2.0)));
}

}  // namespace

ModeTag mode_tag(const PlantState& state) {
  return std::visit(Overloaded{[](const SeaState&) { return ModeTag::sea; },
                               [](const PeaState&) { return ModeTag::pea; },
                               [](const TransitionState&) { return ModeTag::transition; }},
                    state);
}

const char* to_string(ModeTag tag) {
  switch (tag) {
    case ModeTag::sea: return "SEA";
    case ModeTag::pea: return "PEA";
    case ModeTag::transition: return "TRANS";
  }
  return "?";
}

bool is_engaged(const PlantState& state) { return mode_tag(state) != ModeTag::transition; }

double motor_angle(const PlantState& state) {
  return std::visit(Overloaded{[](const SeaState& s) { return s.motor_angle; },
                               [](const PeaState& s) { return s.angle; },
                               [](const TransitionState& s) { return s.motor_angle; }},
                    state);
}

double motor_velocity(const PlantState& state) {
  return std::visit(Overloaded{[](const SeaState& s) { return s.motor_velocity; },
                               [](const PeaState& s) { return s.velocity; },
                               [](const TransitionState& s) { return s.motor_velocity; }},
                    state);
}

double output_angle(const PlantState& state) {
  return std::visit(Overloaded{[](const SeaState& s) { return s.output_angle; },
                               [](const PeaState& s) { return s.angle; },
                               [](const TransitionState& s) { return s.output_angle; }},
                    state);
}

double output_velocity(const PlantState& state) {
  return std::visit(Overloaded{[](const SeaState& s) { return s.output_velocity; },
                               [](const PeaState& s) { return s.velocity; },
                               [](const TransitionState& s) { return s.output_velocity; }},
                    state);
}

double spring_torque(const PlantState& state, const HubModel& hub) {
  return std::visit(
      Overloaded{[&](const SeaState& s) {
                   return hub.torque((s.motor_angle - s.output_angle) - s.spring_offset);
                 },
                 [&](const PeaState& s) { return hub.torque(s.angle - s.anchor); },
                 [](const TransitionState&) { return 0.0; }},
      state);
}

double gravity_torque(double theta, const LoadModel& load) {
  return load.mass * load.gravity * load.radius * std::cos(theta);
}

double coulomb_friction(double omega, double tau_c, double omega_eps) {
  return tau_c * std::tanh(omega / omega_eps);
}

double saturate(double tau, const ActuatorParams& p) {
  return std::clamp(tau, -p.torque_limit, p.torque_limit);
}

TwoMassAccel sea_accelerations(const SeaState& s, double tau_m, double tau_ext,
                               const ActuatorParams& p, const HubModel& hub) {
  require_finite({s.motor_angle, s.motor_velocity, s.output_angle, s.output_velocity,
                  s.spring_offset, tau_m, tau_ext},
                 "sea_accelerations");
  const double tau_s = hub.torque((s.motor_angle - s.output_angle) - s.spring_offset);
  const double fric = coulomb_friction(s.motor_velocity, p.coulomb_sea, p.friction_velocity);
  return {(tau_m - tau_s - p.motor_damping * s.motor_velocity - fric) / p.motor_inertia,
          (tau_s - tau_ext - p.output_damping * s.output_velocity) / p.output_inertia};
}

double pea_acceleration(const PeaState& s, double tau_m, double tau_ext,
                        const ActuatorParams& p, const HubModel& hub) {
  require_finite({s.angle, s.velocity, s.anchor, tau_m, tau_ext}, "pea_acceleration");
  const double fric = coulomb_friction(s.velocity, p.coulomb_pea, p.friction_velocity);
  return (tau_m - hub.torque(s.angle - s.anchor) - tau_ext -
          (p.motor_damping + p.output_damping) * s.velocity - fric) /
         (p.motor_inertia + p.output_inertia);
}

TwoMassAccel freewheel_accelerations(const TransitionState& s, double tau_m, double tau_ext,
                                     const ActuatorParams& p) {
  return {(tau_m - p.motor_damping * s.motor_velocity) / p.motor_inertia,
          (-tau_ext - p.output_damping * s.output_velocity) / p.output_inertia};
}

StepResult step(const PlantState& state, const SimClock& clock, double tau_cmd,
                const ActuatorParams& p, const HubModel& hub, const LoadModel& load,
                double output_disturbance) {
  if (!(clock.dt > 0.0)) throw SimulationError("step: dt must be positive");
  require_finite({tau_cmd, output_disturbance}, "step input");
  const double tau = saturate(tau_cmd, p);
  const double h = clock.dt;
  auto ext = [&](double theta_o) { return gravity_torque(theta_o, load) - output_disturbance; };

  PlantState next = std::visit(
      Overloaded{
          [&](const SeaState& s) -> PlantState {
            const std::array<double, 4> y{s.motor_angle, s.motor_velocity, s.output_angle,
                                          s.output_velocity};
            const int n = friction_substeps(p.coulomb_sea, p.motor_inertia, p.motor_damping, p, h);
            const auto out = rk4_substeps(y, h, n, [&](const std::array<double, 4>& v) {
              const SeaState st{v[0], v[1], v[2], v[3], s.spring_offset};
              const auto a = sea_accelerations(st, tau, ext(v[2]), p, hub);
              return std::array<double, 4>{v[1], a.motor, v[3], a.output};
            });
            return SeaState{out[0], out[1], out[2], out[3], s.spring_offset};
          },
          [&](const PeaState& s) -> PlantState {
            const std::array<double, 2> y{s.angle, s.velocity};
            const int n = friction_substeps(p.coulomb_pea, p.motor_inertia + p.output_inertia,
                                            p.motor_damping + p.output_damping, p, h);
            const auto out = rk4_substeps(y, h, n, [&](const std::array<double, 2>& v) {
              const PeaState st{v[0], v[1], s.anchor};
              return std::array<double, 2>{v[1], pea_acceleration(st, tau, ext(v[0]), p, hub)};
            });
            return PeaState{out[0], out[1], s.anchor};
          },
          [&](const TransitionState& s) -> PlantState {
            const std::array<double, 4> y{s.motor_angle, s.motor_velocity, s.output_angle,
                                          s.output_velocity};
            const auto out = rk4(y, h, [&](const std::array<double, 4>& v) {
              TransitionState st = s;
              st.motor_velocity = v[1];
              st.output_velocity = v[3];
              const auto a = freewheel_accelerations(st, tau, ext(v[2]), p);
              return std::array<double, 4>{v[1], a.motor, v[3], a.output};
            });
            TransitionState r = s;
            r.motor_angle = out[0];
            r.motor_velocity = out[1];
            r.output_angle = out[2];
            r.output_velocity = out[3];
            return r;
          }},
      state);

  if (!all_finite({motor_angle(next), motor_velocity(next), output_angle(next),
                   output_velocity(next)})) {
    throw SimulationError("simulation blew up at t=" + std::to_string(clock.next().time()) +
                          " s (non-finite state)");
  }
  return {next, clock.next(), tau};
}

double locked_restoring_torque(double motor_angle_rad, Mode mode, const ActuatorParams& p,
                               const HubModel& hub) {
  const double spring = hub.torque(motor_angle_rad);
  return mode == Mode::sea ? spring : spring + p.structural_stiffness * motor_angle_rad;
}

double locked_acceleration(const LockedState& s, double tau_m, Mode mode,
                           const ActuatorParams& p, const HubModel& hub) {
  const double tau_c = mode == Mode::sea ? p.coulomb_sea : p.coulomb_pea;
  const double fric = coulomb_friction(s.motor_velocity, tau_c, p.friction_velocity);
  return (tau_m - locked_restoring_torque(s.motor_angle, mode, p, hub) -
          p.motor_damping * s.motor_velocity - fric) /
         p.motor_inertia;
}

LockedState step_locked(const LockedState& s, double tau_cmd, Mode mode, const ActuatorParams& p,
                        const HubModel& hub) {
  const double tau = saturate(tau_cmd, p);
  const std::array<double, 2> y{s.motor_angle, s.motor_velocity};
  const double tau_c = mode == Mode::sea ? p.coulomb_sea : p.coulomb_pea;
  const int n = friction_substeps(tau_c, p.motor_inertia, p.motor_damping, p, p.dt);
  const auto out = rk4_substeps(y, p.dt, n, [&](const std::array<double, 2>& v) {
    return std::array<double, 2>{v[1], locked_acceleration({v[0], v[1]}, tau, mode, p, hub)};
  });
  if (!all_finite({out[0], out[1]})) throw SimulationError("locked-output run blew up");
  return {out[0], out[1]};
}

}  // namespace dtea
