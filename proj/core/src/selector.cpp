#include "dtea/selector.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dtea {

double transmitted_torque(const PlantState& state, double tau_m, double tau_ext,
                          const ActuatorParams& p, const HubModel& hub) {
  if (const auto* sea = std::get_if<SeaState>(&state)) {
    return hub.torque((sea->motor_angle - sea->output_angle) - sea->spring_offset);
  }
  if (const auto* pea = std::get_if<PeaState>(&state)) {
    const double alpha = pea_acceleration(*pea, tau_m, tau_ext, p, hub);
    return tau_m - p.motor_inertia * alpha;
  }
  throw std::logic_error("transmitted_torque: selector is in transition");
}

SwitchDecision request_switch(const SwitchRequest& req, const PlantState& state, double tau_m,
                              double tau_ext, const ActuatorParams& p, const HubModel& hub) {
  const ModeTag tag = mode_tag(state);
  if (tag == ModeTag::transition) {
    return SwitchRejected{0.0, "selector already in transition"};
  }
  const Mode current = tag == ModeTag::sea ? Mode::sea : Mode::pea;
  if (req.target == current) {
    return SwitchRejected{0.0, std::string("already in ") + std::string(to_string(current))};
  }
  const double torque = transmitted_torque(state, tau_m, tau_ext, p, hub);
  if (!(std::abs(torque) < p.disengage_torque)) {
    std::ostringstream os;
    os << "transmitted torque " << torque << " Nm exceeds disengage limit "
       << p.disengage_torque << " Nm";
    return SwitchRejected{torque, os.str()};
  }
  TransitionState t;
  t.motor_angle = motor_angle(state);
  t.motor_velocity = motor_velocity(state);
  t.output_angle = output_angle(state);
  t.output_velocity = output_velocity(state);
  t.target = req.target;
  t.time_remaining = p.switch_latency;
  return t;
}

double engagement_energy_loss(const TransitionState& s, const ActuatorParams& p) {
  const double jm = p.motor_inertia;
  const double jo = p.output_inertia;
  const double merged = (jm * s.motor_velocity + jo * s.output_velocity) / (jm + jo);
  return 0.5 * jm * s.motor_velocity * s.motor_velocity +
         0.5 * jo * s.output_velocity * s.output_velocity - 0.5 * (jm + jo) * merged * merged;
}

PlantState advance_selector(const TransitionState& state, double dt, const ActuatorParams& p) {
  TransitionState s = state;
  s.time_remaining -= dt;
  if (s.time_remaining >= 0.5 * dt) return s;

  if (s.target == Mode::pea) {
    const double jm = p.motor_inertia;
    const double jo = p.output_inertia;
    PeaState pea;
    pea.angle = s.output_angle;
    pea.anchor = s.output_angle;
    pea.velocity = (jm * s.motor_velocity + jo * s.output_velocity) / (jm + jo);
    return pea;
  }
  SeaState sea;
  sea.motor_angle = s.motor_angle;
  sea.motor_velocity = s.motor_velocity;
  sea.output_angle = s.output_angle;
  sea.output_velocity = s.output_velocity;
  sea.spring_offset = s.motor_angle - s.output_angle;
  return sea;
}

CycleCount cycle_counter(const std::vector<SwitchRecord>& records) {
  CycleCount count;
  for (const auto& r : records) {
    if (r.outcome == SwitchOutcome::completed) {
      ++count.completed;
    } else {
      ++count.rejected;
    }
  }
  return count;
}

Selector::Selector(const ActuatorParams& params, const HubModel& hub)
    : params_(params), hub_(hub) {}

SwitchDecision Selector::try_switch(PlantState& state, Mode target, double now, double tau_m,
                                    double tau_ext) {
  if (in_flight_) return SwitchRejected{0.0, "selector already in transition"};
  const ModeTag tag = mode_tag(state);
  auto decision = request_switch({target, now}, state, tau_m, tau_ext, params_, hub_);
  if (const auto* t = std::get_if<TransitionState>(&decision)) {
    pending_ = SwitchRecord{};
    pending_.request_time = now;
    pending_.from = tag == ModeTag::sea ? Mode::sea : Mode::pea;
    pending_.to = target;
    pending_.transmitted_torque = transmitted_torque(state, tau_m, tau_ext, params_, hub_);
    pending_.outcome = SwitchOutcome::completed;
    state = *t;
    in_flight_ = true;
  }
  return decision;
}

bool Selector::advance(PlantState& state, double now) {
  const auto* t = std::get_if<TransitionState>(&state);
  if (t == nullptr) return false;
  const double loss = t->target == Mode::pea ? engagement_energy_loss(*t, params_) : 0.0;
  state = advance_selector(*t, params_.dt, params_);
  if (!is_engaged(state)) return false;
  pending_.engage_time = now;
  pending_.energy_loss = loss;
  records_.push_back(pending_);
  in_flight_ = false;
  return true;
}

void Selector::abandon(Mode from, Mode target, double request_time, double torque) {
  SwitchRecord r;
  r.request_time = request_time;
  r.engage_time = request_time;
  r.from = from;
  r.to = target;
  r.transmitted_torque = torque;
  r.outcome = SwitchOutcome::rejected;
  records_.push_back(r);
}

}  // namespace dtea
