#pragma once

#include <string>
#include <variant>
#include <vector>

#include "dtea/plant.hpp"

namespace dtea {

struct SwitchRequest {
  Mode target = Mode::pea;
  double issued_at = 0.0;
};

enum class SwitchOutcome { completed, rejected };

struct SwitchRecord {
  double request_time = 0.0;
  double engage_time = 0.0;  // equals request_time for rejected records
  Mode from = Mode::sea;
  Mode to = Mode::pea;
  double transmitted_torque = 0.0;  // at the request instant
  SwitchOutcome outcome = SwitchOutcome::completed;
  double energy_loss = 0.0;  // kinetic energy lost at a PEA engagement, J
};

struct SwitchRejected {
  double transmitted_torque = 0.0;
  std::string reason;
};

using SwitchDecision = std::variant<TransitionState, SwitchRejected>;

/// Torque through the interface that has to disengage. SEA: spring torque.
/// PEA: motor torque minus the part spent accelerating the motor's own
/// inertia, tau_m - J_m * alpha. Throws std::logic_error during a transition.
double transmitted_torque(const PlantState& state, double tau_m, double tau_ext,
                          const ActuatorParams& p, const HubModel& hub);

/// Torque gate. Accepts when |transmitted torque| < disengage_torque and
/// starts the selector travel with both coordinates carried over.
SwitchDecision request_switch(const SwitchRequest& req, const PlantState& state, double tau_m,
                              double tau_ext, const ActuatorParams& p, const HubModel& hub);

/// Counts down the selector travel by dt. On arrival the new path engages
/// unloaded: PEA anchors the spring at the current output angle and merges
/// the velocities by conserving angular momentum; SEA captures the current
/// relative angle as the spring offset.
PlantState advance_selector(const TransitionState& state, double dt, const ActuatorParams& p);

/// Kinetic energy dissipated if this transition engaged PEA right now.
double engagement_energy_loss(const TransitionState& state, const ActuatorParams& p);

struct CycleCount {
  int completed = 0;
  int rejected = 0;

  bool operator==(const CycleCount&) const = default;
};

CycleCount cycle_counter(const std::vector<SwitchRecord>& records);

/// Bookkeeping wrapper around the gate and the travel countdown for use in a
/// stepping loop. One switch may be in flight at a time.
class Selector {
 public:
  Selector(const ActuatorParams& params, const HubModel& hub);

  /// Tries to start a switch. On acceptance `state` becomes a transition and
  /// the in-flight record is opened. Returns the decision.
  SwitchDecision try_switch(PlantState& state, Mode target, double now, double tau_m,
                            double tau_ext);

  /// Call once after every plant step. Finalizes the engagement on arrival.
  /// Returns true on the step that engages.
  bool advance(PlantState& state, double now);

  /// Records a request that was given up on.
  void abandon(Mode from, Mode target, double request_time, double torque);

  bool in_transition() const { return in_flight_; }
  const std::vector<SwitchRecord>& records() const { return records_; }

 private:
  ActuatorParams params_;
  HubModel hub_;
  std::vector<SwitchRecord> records_;
  SwitchRecord pending_;
  bool in_flight_ = false;
};

}  // namespace dtea
