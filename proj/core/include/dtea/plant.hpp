#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "dtea/params.hpp"
#include "dtea/spring_hub.hpp"

namespace dtea {

/// Raised when the integrator produces non-finite values or is fed them.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-mass series configuration. The spring deflection is
/// (motor_angle - output_angle) - spring_offset.
struct SeaState {
  double motor_angle = 0.0;
  double motor_velocity = 0.0;
  double output_angle = 0.0;
  double output_velocity = 0.0;
  double spring_offset = 0.0;
};

/// Rigid motor-output body with the spring grounded at `anchor`.
struct PeaState {
  double angle = 0.0;
  double velocity = 0.0;
  double anchor = 0.0;
};

/// Selector in travel: neither torque path is engaged.
struct TransitionState {
  double motor_angle = 0.0;
  double motor_velocity = 0.0;
  double output_angle = 0.0;
  double output_velocity = 0.0;
  Mode target = Mode::pea;
  double time_remaining = 0.0;
};

using PlantState = std::variant<SeaState, PeaState, TransitionState>;

enum class ModeTag { sea, pea, transition };

ModeTag mode_tag(const PlantState& state);
const char* to_string(ModeTag tag);
bool is_engaged(const PlantState& state);

double motor_angle(const PlantState& state);
double motor_velocity(const PlantState& state);
double output_angle(const PlantState& state);
double output_velocity(const PlantState& state);

/// Torque currently carried by the spring (zero while in transition).
double spring_torque(const PlantState& state, const HubModel& hub);

/// Time is always step_index * dt; it is never accumulated.
struct SimClock {
  std::int64_t step_index = 0;
  double dt = 1.0 / 8000.0;

  double time() const { return static_cast<double>(step_index) * dt; }
  SimClock next() const { return {step_index + 1, dt}; }
};

struct TwoMassAccel {
  double motor = 0.0;
  double output = 0.0;
};

/// Load torque of the arm, m g r cos(theta), with theta = 0 horizontal.
double gravity_torque(double theta, const LoadModel& load);

/// tau_c * tanh(omega / omega_eps).
double coulomb_friction(double omega, double tau_c, double omega_eps);

/// Series dynamics. Coulomb friction (coulomb_sea) acts on the motor side.
TwoMassAccel sea_accelerations(const SeaState& s, double tau_m, double tau_ext,
                               const ActuatorParams& p, const HubModel& hub);

/// Parallel dynamics on the combined inertia.
double pea_acceleration(const PeaState& s, double tau_m, double tau_ext,
                        const ActuatorParams& p, const HubModel& hub);

/// Decoupled motor and output during selector travel.
TwoMassAccel freewheel_accelerations(const TransitionState& s, double tau_m, double tau_ext,
                                     const ActuatorParams& p);

struct StepResult {
  PlantState state;
  SimClock clock;
  double applied_torque = 0.0;
};

/// One classical RK4 step. The command is clamped to +-torque_limit and held
/// over the step. `tau_ext` inside each stage is gravity at the stage's output
/// angle minus `output_disturbance` (an externally applied output torque).
/// Transition states are integrated but their countdown is left to the
/// selector. Throws SimulationError on non-finite results.
StepResult step(const PlantState& state, const SimClock& clock, double tau_cmd,
                const ActuatorParams& p, const HubModel& hub, const LoadModel& load,
                double output_disturbance = 0.0);

/// Clamp to the actuator torque limit.
double saturate(double tau, const ActuatorParams& p);

// Locked-output fixture: the output is held at zero, the motor works against
// the spring (SEA) or against spring plus structural compliance (PEA). No
// gravity acts on the motor.
struct LockedState {
  double motor_angle = 0.0;
  double motor_velocity = 0.0;
};

/// Motor-side restoring torque under the fixture.
double locked_restoring_torque(double motor_angle, Mode mode, const ActuatorParams& p,
                               const HubModel& hub);

double locked_acceleration(const LockedState& s, double tau_m, Mode mode,
                           const ActuatorParams& p, const HubModel& hub);

LockedState step_locked(const LockedState& s, double tau_cmd, Mode mode,
                        const ActuatorParams& p, const HubModel& hub);

}  // namespace dtea
