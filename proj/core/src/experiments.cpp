#include "dtea/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace dtea {

std::vector<double> column_motor_angle(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.rows.size());
  for (const auto& r : trace.rows) out.push_back(r.motor_angle);
  return out;
}

std::vector<double> column_output_angle(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.rows.size());
  for (const auto& r : trace.rows) out.push_back(r.output_angle);
  return out;
}

HubModel dynamics_hub(const Preset& preset) {
  return HubModel::linearized(preset.hub, preset.params.hub_stiffness);
}

namespace {

std::int64_t steps_for(double seconds, double dt) { return std::llround(seconds / dt); }

// Spring deflection that produces `torque`. The hub curve is monotone on the
// bracket used here.
double invert_hub(const HubModel& hub, double torque) {
  if (hub.mode() == HubMode::linearized) return torque / hub.stiffness();
  double lo = -std::numbers::pi / 2.0;
  double hi = std::numbers::pi / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hub.torque(mid) < torque) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Closed-loop stepping with trace capture.
class Loop {
 public:
  Loop(const Preset& preset, const HubModel& hub, PlantState initial, std::size_t stride)
      : preset_(preset), hub_(hub), state_(initial), stride_(std::max<std::size_t>(stride, 1)) {
    clock_.dt = preset.params.dt;
    trace_.sample_period = preset.params.dt * static_cast<double>(stride_);
  }

  double now() const { return clock_.time(); }
  std::int64_t index() const { return clock_.step_index; }
  PlantState& state() { return state_; }
  const HubModel& hub() const { return hub_; }
  double tau_ext() const { return gravity_torque(output_angle(state_), preset_.load); }

  double advance(double tau_cmd, double disturbance = 0.0) {
    const double applied = saturate(tau_cmd, preset_.params);
    if (clock_.step_index % static_cast<std::int64_t>(stride_) == 0) {
      TraceRow row;
      row.t = clock_.time();
      row.mode = mode_tag(state_);
      row.motor_angle = motor_angle(state_);
      row.motor_velocity = motor_velocity(state_);
      row.output_angle = output_angle(state_);
      row.output_velocity = output_velocity(state_);
      row.tau_cmd = tau_cmd;
      row.tau_applied = applied;
      row.tau_spring = spring_torque(state_, hub_);
      row.current = torque_to_current(applied, preset_.params.torque_constant);
      trace_.rows.push_back(row);
    }
    auto result = step(state_, clock_, tau_cmd, preset_.params, hub_, preset_.load, disturbance);
    state_ = result.state;
    clock_ = result.clock;
    return result.applied_torque;
  }

  Trace take_trace() { return std::move(trace_); }

 private:
  const Preset& preset_;
  HubModel hub_;
  PlantState state_;
  SimClock clock_;
  std::size_t stride_;
  Trace trace_;
};

Mode engaged_mode(const PlantState& state) {
  return mode_tag(state) == ModeTag::pea ? Mode::pea : Mode::sea;
}

PlantState initial_hold_state(Mode mode, double target, double gain, const Preset& preset,
                              const HubModel& hub, bool balance_gravity) {
  if (mode == Mode::sea) return sea_hold_equilibrium(target, gain, preset, hub);
  return pea_hold_equilibrium(target, gain, balance_gravity, preset, hub);
}

// A switch request that has not yet been accepted or abandoned.
struct Pending {
  Mode from = Mode::sea;
  Mode target = Mode::pea;
  double requested_at = 0.0;
  double first_torque = 0.0;
  bool assisting = false;
};

struct SwitchStats {
  int rejections = 0;
  int assisted = 0;
};

// Evaluates the pending request for this step. Returns the (possibly
// overridden) motor command and clears `pending` once resolved.
double service_request(std::optional<Pending>& pending, Selector& selector, Loop& loop,
                       const SwitchPolicy& policy, double cmd, SwitchStats& stats,
                       const ActuatorParams& p) {
  if (!pending || selector.in_transition()) return cmd;
  const double t = loop.now();
  const double elapsed = t - pending->requested_at;
  if (policy.unload_assist && elapsed >= policy.assist_after) {
    pending->assisting = true;
    cmd = 0.0;
  }
  const auto decision =
      selector.try_switch(loop.state(), pending->target, t, saturate(cmd, p), loop.tau_ext());
  if (std::holds_alternative<TransitionState>(decision)) {
    if (pending->assisting) ++stats.assisted;
    pending.reset();
    return cmd;
  }
  ++stats.rejections;
  if (elapsed >= policy.give_up_after) {
    selector.abandon(pending->from, pending->target, pending->requested_at,
                     std::get<SwitchRejected>(decision).transmitted_torque);
    pending.reset();
  }
  return cmd;
}

// Sliding-window rest test: small peak-to-peak drift and low speed over the
// last `window` samples.
class RestDetector {
 public:
  RestDetector(std::size_t window, double tolerance, double max_speed)
      : window_(window), tolerance_(tolerance), max_speed_(max_speed) {}

  void push(double angle, double speed) {
    const std::size_t i = count_++;
    if (speed > max_speed_) last_fast_ = static_cast<std::int64_t>(i);
    while (!lows_.empty() && lows_.back().second >= angle) lows_.pop_back();
    while (!highs_.empty() && highs_.back().second <= angle) highs_.pop_back();
    lows_.emplace_back(i, angle);
    highs_.emplace_back(i, angle);
    while (lows_.front().first + window_ <= i) lows_.pop_front();
    while (highs_.front().first + window_ <= i) highs_.pop_front();
  }

  bool at_rest() const {
    if (count_ < window_) return false;
    if (static_cast<std::int64_t>(count_) - last_fast_ <= static_cast<std::int64_t>(window_)) return false;
    return highs_.front().second - lows_.front().second <= tolerance_;
  }

 private:
  std::size_t window_;
  double tolerance_;
  double max_speed_;
  std::size_t count_ = 0;
  std::int64_t last_fast_ = -1;
  std::deque<std::pair<std::size_t, double>> lows_;
  std::deque<std::pair<std::size_t, double>> highs_;
};

}  // namespace

SeaState sea_hold_equilibrium(double target, double gain, const Preset& preset,
                              const HubModel& hub) {
  double theta_o = target;
  double theta_m = target;
  for (int i = 0; i < 500; ++i) {
    const double load = gravity_torque(theta_o, preset.load);
    theta_m = target - load / gain;
    theta_o = theta_m - invert_hub(hub, load);
  }
  SeaState s;
  s.motor_angle = theta_m;
  s.output_angle = theta_o;
  return s;
}

PeaState pea_hold_equilibrium(double target, double gain, bool balance_gravity,
                              const Preset& preset, const HubModel& hub) {
  PeaState s;
  if (balance_gravity) {
    s.angle = target;
    s.anchor = target - invert_hub(hub, -gravity_torque(target, preset.load));
    return s;
  }
  s.anchor = target;
  double theta = target;
  const double k = hub.stiffness();
  for (int i = 0; i < 500; ++i) {
    // gain (target - theta) = gravity(theta) + hub(theta - target), Newton-free relaxation
    const double residual =
        gain * (target - theta) - gravity_torque(theta, preset.load) - hub.torque(theta - target);
    theta += residual / (gain + k);
  }
  s.angle = theta;
  return s;
}

// ---------------------------------------------------------------------------

StiffnessRun run_static_stiffness(Mode mode, const Preset& preset,
                                  const StiffnessConfig& config) {
  require_valid(preset);
  const auto& p = preset.params;
  const HubModel hub = config.hub_mode == HubMode::linearized
                           ? HubModel::linearized(preset.hub, p.hub_stiffness)
                           : HubModel::nonlinear(preset.hub);
  const auto& profile = config.profile;
  const std::int64_t per_cycle = steps_for(profile.cycle_duration(), p.dt);
  const std::int64_t total = per_cycle * profile.cycles;
  const std::size_t stride = std::max<std::size_t>(config.trace_stride, 1);

  StiffnessRun run;
  run.trace.sample_period = p.dt * static_cast<double>(stride);
  std::vector<double> angles;
  std::vector<double> torques;
  angles.reserve(static_cast<std::size_t>(total) + 1);
  torques.reserve(static_cast<std::size_t>(total) + 1);

  LockedState s;
  const ModeTag tag = mode == Mode::sea ? ModeTag::sea : ModeTag::pea;
  for (std::int64_t k = 0; k <= total; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    const double cmd = profile(t);
    const double applied = saturate(cmd, p);
    angles.push_back(s.motor_angle);
    torques.push_back(applied);
    if (static_cast<std::size_t>(k) % stride == 0) {
      TraceRow row;
      row.t = t;
      row.mode = tag;
      row.motor_angle = s.motor_angle;
      row.motor_velocity = s.motor_velocity;
      row.tau_cmd = cmd;
      row.tau_applied = applied;
      row.tau_spring = locked_restoring_torque(s.motor_angle, mode, p, hub);
      row.current = torque_to_current(applied, p.torque_constant);
      run.trace.rows.push_back(row);
    }
    if (k < total) s = step_locked(s, cmd, mode, p, hub);
  }

  auto& rep = run.report;
  rep.mode = mode;
  const auto fit = linear_fit(angles, torques);
  rep.stiffness = fit.slope;
  rep.intercept = fit.intercept;
  rep.stiffness_stderr = fit.slope_stderr;
  rep.sample_count = angles.size();
  rep.expected_stiffness =
      hub.stiffness() + (mode == Mode::pea ? p.structural_stiffness : 0.0);

  double area_sum = 0.0;
  for (int c = 0; c < profile.cycles; ++c) {
    const auto begin = static_cast<std::size_t>(c * per_cycle);
    const auto end = static_cast<std::size_t>((c + 1) * per_cycle);
    std::vector<Point> loop;
    loop.reserve(end - begin + 1);
    for (std::size_t i = begin; i <= end; ++i) loop.emplace_back(angles[i], torques[i]);
    const double area = hysteresis_area(loop);
    rep.cycle_loop_areas.push_back(area);
    area_sum += area;
    const std::span<const double> xs(angles.data() + begin, end - begin + 1);
    const std::span<const double> ys(torques.data() + begin, end - begin + 1);
    rep.cycle_stiffness.push_back(linear_fit(xs, ys).slope);
  }
  rep.loop_area = area_sum / profile.cycles;
  return run;
}

// ---------------------------------------------------------------------------

TrackingRun run_dynamic_switching(const Preset& preset, const TrackingConfig& config) {
  require_valid(preset);
  if (!(config.switch_period > 0.0) || !(config.duration > 0.0)) {
    throw ConfigError("tracking: duration and switch period must be positive");
  }
  const auto& p = preset.params;
  const HubModel hub = dynamics_hub(preset);
  Loop loop(preset, hub,
            initial_hold_state(config.initial_mode, 0.0, config.gain, preset, hub, false),
            config.trace_stride);
  Selector selector(p, hub);

  const auto n_switches = static_cast<int>(std::floor(config.duration / config.switch_period + 1e-9));
  const std::int64_t end_step = steps_for(config.duration, p.dt);
  const std::int64_t hard_stop =
      end_step + steps_for(config.policy.give_up_after + p.switch_latency + 1.0, p.dt);
  int issued = 0;
  std::optional<Pending> pending;
  SwitchStats stats;

  // Full-rate samples for per-segment statistics.
  std::vector<ModeTag> tags;
  std::vector<double> currents;
  std::vector<double> errors;
  std::vector<double> times;

  while (true) {
    const std::int64_t k = loop.index();
    const bool done = k >= end_step && issued == n_switches && !pending && !selector.in_transition();
    if (done || k >= hard_stop) break;

    if (issued < n_switches && !pending &&
        k >= steps_for((issued + 1) * config.switch_period, p.dt) && !selector.in_transition()) {
      const Mode from = engaged_mode(loop.state());
      pending = Pending{from, other(from), loop.now(), 0.0, false};
      ++issued;
    }
    const double t = loop.now();
    const double target = sinusoid_target(t, config.amplitude, config.frequency);
    double cmd = p_position(target, motor_angle(loop.state()), config.gain);
    cmd = service_request(pending, selector, loop, config.policy, cmd, stats, p);

    tags.push_back(mode_tag(loop.state()));
    errors.push_back(target - motor_angle(loop.state()));
    times.push_back(t);
    const double applied = loop.advance(cmd);
    currents.push_back(torque_to_current(applied, p.torque_constant));
    selector.advance(loop.state(), loop.now());
  }

  TrackingRun run;
  auto& rep = run.report;
  rep.switches = selector.records();
  rep.gate_rejections = stats.rejections;
  rep.assisted_switches = stats.assisted;
  rep.all_completed =
      static_cast<int>(rep.switches.size()) == n_switches &&
      std::all_of(rep.switches.begin(), rep.switches.end(),
                  [](const SwitchRecord& r) { return r.outcome == SwitchOutcome::completed; });

  std::vector<double> sea_i;
  std::vector<double> pea_i;
  std::vector<double> sea_e;
  std::vector<double> pea_e;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= tags.size(); ++i) {
    if (i < tags.size() && tags[i] == tags[begin]) continue;
    const std::span<const double> cur(currents.data() + begin, i - begin);
    const std::span<const double> err(errors.data() + begin, i - begin);
    SegmentStats seg;
    seg.mode = tags[begin];
    seg.t_start = times[begin];
    seg.t_end = times[i - 1] + p.dt;
    seg.current_rms = rms(cur);
    for (double c : cur) seg.current_peak = std::max(seg.current_peak, std::abs(c));
    seg.tracking_rms = rms(err);
    rep.segments.push_back(seg);
    if (seg.mode == ModeTag::sea) {
      sea_i.insert(sea_i.end(), cur.begin(), cur.end());
      sea_e.insert(sea_e.end(), err.begin(), err.end());
      rep.sea_current_peak = std::max(rep.sea_current_peak, seg.current_peak);
    } else if (seg.mode == ModeTag::pea) {
      pea_i.insert(pea_i.end(), cur.begin(), cur.end());
      pea_e.insert(pea_e.end(), err.begin(), err.end());
      rep.pea_current_peak = std::max(rep.pea_current_peak, seg.current_peak);
    }
    begin = i;
  }
  if (!sea_i.empty()) {
    rep.sea_current_rms = rms(sea_i);
    rep.sea_tracking_rms = rms(sea_e);
  }
  if (!pea_i.empty()) {
    rep.pea_current_rms = rms(pea_i);
    rep.pea_tracking_rms = rms(pea_e);
  }
  run.trace = loop.take_trace();
  return run;
}

// ---------------------------------------------------------------------------

DisturbanceRun run_disturbance(Mode mode, const Preset& preset, const DisturbanceConfig& config) {
  require_valid(preset);
  const auto& p = preset.params;
  const int impacts = config.impacts > 0 ? config.impacts : (mode == Mode::sea ? 6 : 5);
  const double pulse = config.pulse_torque != 0.0 ? config.pulse_torque : default_pulse_torque;
  const std::int64_t first_steps = steps_for(config.settle_before, p.dt);
  const std::int64_t gap_steps = steps_for(config.impact_interval, p.dt);
  const std::int64_t wait_steps = steps_for(config.max_wait, p.dt);
  const std::int64_t pulse_steps = steps_for(config.pulse_duration, p.dt);
  const auto window = static_cast<std::size_t>(std::max<std::int64_t>(1, steps_for(config.rest_window, p.dt)));
  if (gap_steps <= pulse_steps) throw ConfigError("disturbance: impact interval too short");
  if (!(config.band > 0.0)) throw ConfigError("disturbance: band must be positive");

  const HubModel hub = dynamics_hub(preset);
  Loop loop(preset, hub,
            initial_hold_state(mode, config.hold_angle, config.gain, preset, hub,
                               config.balance_gravity_in_pea),
            config.trace_stride);

  std::vector<double> measured;
  RestDetector rest(window, config.rest_tolerance, config.rest_speed);
  std::vector<std::size_t> impact_at;
  std::int64_t earliest = first_steps;
  std::int64_t pulse_end = 0;

  for (std::int64_t k = 0;; ++k) {
    const PlantState& s = loop.state();
    const double angle = config.side == MeasuredSide::output ? output_angle(s) : motor_angle(s);
    measured.push_back(angle);
    rest.push(angle, std::max(std::abs(motor_velocity(s)), std::abs(output_velocity(s))));

    if (k >= earliest && rest.at_rest()) {
      if (static_cast<int>(impact_at.size()) == impacts) break;
      impact_at.push_back(measured.size() - 1);
      pulse_end = k + pulse_steps;
      earliest = k + gap_steps;
    } else if (k >= earliest + wait_steps) {
      std::ostringstream os;
      os << "disturbance: arm not at rest " << config.max_wait << " s after "
         << (impact_at.empty() ? std::string("start")
                               : "impact " + std::to_string(impact_at.size()))
         << "; increase damping or max_wait";
      throw SimulationError(os.str());
    }
    const double disturbance = k < pulse_end ? pulse : 0.0;
    const double cmd = p_position(config.hold_angle, motor_angle(loop.state()), config.gain);
    loop.advance(cmd, disturbance);
  }

  DisturbanceRun run;
  auto& rep = run.report;
  rep.mode = mode;
  rep.side = config.side;
  rep.pulse_torque = pulse;
  double peak_sum = 0.0;
  double settle_sum = 0.0;
  bool all_settled = true;
  for (std::size_t j = 0; j < impact_at.size(); ++j) {
    const std::size_t begin = impact_at[j];
    const std::size_t end = j + 1 < impact_at.size() ? impact_at[j + 1] : measured.size();
    const std::span<const double> seg(measured.data() + begin, end - begin);
    ImpactResult r;
    r.impact_time = static_cast<double>(begin) * p.dt;
    r.reference = seg.front();
    r.peak_deg = peak_deflection(seg, r.reference);
    r.settling_ms = settling_time(seg, p.dt, r.reference, config.band);
    const std::size_t settle_index =
        r.settling_ms ? static_cast<std::size_t>(std::llround(*r.settling_ms / 1000.0 / p.dt))
                      : seg.size();
    const auto crossings = zero_crossings(seg.first(std::min(settle_index, seg.size())), r.reference);
    r.zero_crossings = static_cast<int>(crossings.size());
    if (crossings.size() >= 3) {
      const double span_s = static_cast<double>(crossings.back() - crossings.front()) * p.dt;
      r.oscillation_hz = static_cast<double>(crossings.size() - 1) / (2.0 * span_s);
    }
    peak_sum += r.peak_deg;
    if (r.settling_ms) {
      settle_sum += *r.settling_ms;
    } else {
      all_settled = false;
    }
    rep.impacts.push_back(r);
  }
  rep.mean_peak_deg = peak_sum / impacts;
  if (all_settled) rep.mean_settling_ms = settle_sum / impacts;
  run.trace = loop.take_trace();
  return run;
}

// ---------------------------------------------------------------------------

CycleRun run_switch_cycle(const Preset& preset, const CycleConfig& config) {
  require_valid(preset);
  if (config.cycles < 1) throw ConfigError("cycle: need at least one switch");
  const auto& p = preset.params;
  const HubModel hub = dynamics_hub(preset);
  Loop loop(preset, hub, sea_hold_equilibrium(config.hold_angle, config.gain, preset, hub),
            config.trace_stride);
  Selector selector(p, hub);
  SwitchStats stats;
  CycleReport rep;

  const std::int64_t dwell_steps = steps_for(config.dwell, p.dt);
  std::int64_t next_request = loop.index() + dwell_steps;
  std::optional<Pending> pending;
  std::optional<SwitchRecord> last_completed;

  auto violation = [&](const std::string& what) {
    std::ostringstream os;
    os << "switch " << rep.requested << " at t=" << loop.now() << " s: " << what;
    throw InvariantViolation(os.str());
  };

  while (rep.requested < config.cycles || pending || selector.in_transition()) {
    if (!pending && !selector.in_transition() && rep.requested < config.cycles &&
        loop.index() >= next_request) {
      const Mode from = engaged_mode(loop.state());
      pending = Pending{from, other(from), loop.now(), 0.0, false};
      ++rep.requested;
    }
    double cmd = p_position(config.hold_angle, motor_angle(loop.state()), config.gain);
    const bool had_pending = pending.has_value();
    cmd = service_request(pending, selector, loop, config.policy, cmd, stats, p);
    if (had_pending && !pending && !selector.in_transition()) {
      next_request = loop.index() + dwell_steps;  // abandoned
    }

    std::optional<TransitionState> before;
    loop.advance(cmd);
    if (const auto* t = std::get_if<TransitionState>(&loop.state())) before = *t;
    if (!selector.advance(loop.state(), loop.now())) continue;

    // Engagement just happened: check every selector invariant.
    const SwitchRecord& rec = selector.records().back();
    const double latency = rec.engage_time - rec.request_time;
    const double latency_error = std::abs(latency - p.switch_latency);
    rep.max_latency_error = std::max(rep.max_latency_error, latency_error);
    if (latency_error > p.dt + 1e-12) violation("latency " + std::to_string(latency) + " s");
    if (!(std::abs(rec.transmitted_torque) < p.disengage_torque)) {
      violation("gate accepted " + std::to_string(rec.transmitted_torque) + " Nm");
    }
    const double engaged_spring = spring_torque(loop.state(), hub);
    rep.max_engaged_spring_torque = std::max(rep.max_engaged_spring_torque, std::abs(engaged_spring));
    if (engaged_spring != 0.0) violation("spring loaded at engagement");
    if (rec.to == Mode::pea && before) {
      const double jm = p.motor_inertia;
      const double jo = p.output_inertia;
      const double momentum_before = jm * before->motor_velocity + jo * before->output_velocity;
      const double momentum_after = (jm + jo) * motor_velocity(loop.state());
      if (std::abs(momentum_after - momentum_before) >
          1e-12 * std::max(1.0, std::abs(momentum_before))) {
        violation("angular momentum not conserved at PEA engagement");
      }
    }
    if (rec.from == rec.to) violation("self transition");
    if (last_completed && last_completed->to != rec.from) violation("modes do not alternate");
    last_completed = rec;
    rep.max_energy_loss = std::max(rep.max_energy_loss, rec.energy_loss);
    next_request = loop.index() + dwell_steps;
  }

  rep.switches = selector.records();
  const auto count = cycle_counter(rep.switches);
  rep.completed = count.completed;
  rep.rejected = count.rejected;
  rep.retries = stats.rejections;
  rep.assisted = stats.assisted;
  CycleRun run;
  run.report = std::move(rep);
  run.trace = loop.take_trace();
  return run;
}

}  // namespace dtea
