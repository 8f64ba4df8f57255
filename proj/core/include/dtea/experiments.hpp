#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dtea/control.hpp"
#include "dtea/metrics.hpp"
#include "dtea/params.hpp"
#include "dtea/plant.hpp"
#include "dtea/selector.hpp"
#include "dtea/spring_hub.hpp"

namespace dtea {

struct TraceRow {
  double t = 0.0;
  ModeTag mode = ModeTag::sea;
  double motor_angle = 0.0;
  double motor_velocity = 0.0;
  double output_angle = 0.0;
  double output_velocity = 0.0;
  double tau_cmd = 0.0;
  double tau_applied = 0.0;
  double tau_spring = 0.0;
  double current = 0.0;  // q-axis, A

  bool operator==(const TraceRow&) const = default;
};

/// Uniformly sampled simulation record. Row k holds the state at t_k and the
/// torque held over [t_k, t_k + dt).
struct Trace {
  double sample_period = 1.0 / 8000.0;
  std::vector<TraceRow> rows;

  bool operator==(const Trace&) const = default;
};

std::vector<double> column_motor_angle(const Trace& trace);
std::vector<double> column_output_angle(const Trace& trace);

// ---------------------------------------------------------------------------
// Locked-output static stiffness

struct StiffnessConfig {
  TorqueCycleProfile profile;
  HubMode hub_mode = HubMode::linearized;
  std::size_t trace_stride = 8;  // 1 kHz trace at the default rate
};

struct StiffnessReport {
  Mode mode = Mode::sea;
  double stiffness = 0.0;  // Nm/rad
  double intercept = 0.0;  // Nm
  double stiffness_stderr = 0.0;
  double loop_area = 0.0;  // mean over cycles, Nm rad
  std::vector<double> cycle_loop_areas;
  std::vector<double> cycle_stiffness;
  double expected_stiffness = 0.0;  // configured K_s or K_s + K_struct
  std::size_t sample_count = 0;
};

struct StiffnessRun {
  Trace trace;
  StiffnessReport report;
};

StiffnessRun run_static_stiffness(Mode mode, const Preset& preset,
                                  const StiffnessConfig& config = {});

// ---------------------------------------------------------------------------
// Switch scheduling shared by the tracking and endurance protocols

/// A rejected request is retried every step. After `assist_after` seconds of
/// rejections the motor command is cut to unload the interface; after
/// `give_up_after` seconds the request is recorded as rejected.
struct SwitchPolicy {
  double assist_after = 0.25;
  double give_up_after = 2.0;
  bool unload_assist = true;
};

// ---------------------------------------------------------------------------
// Tracking with periodic topology switches

struct TrackingConfig {
  double duration = 30.0;
  double switch_period = 5.0;
  double gain = 40.0;
  double amplitude = deg_to_rad(20.0);
  double frequency = 1.0;
  Mode initial_mode = Mode::sea;
  SwitchPolicy policy;
  std::size_t trace_stride = 1;
};

struct SegmentStats {
  ModeTag mode = ModeTag::sea;
  double t_start = 0.0;
  double t_end = 0.0;
  double current_rms = 0.0;
  double current_peak = 0.0;
  double tracking_rms = 0.0;  // motor angle error, rad
};

struct TrackingReport {
  std::vector<SegmentStats> segments;
  std::vector<SwitchRecord> switches;
  int gate_rejections = 0;
  int assisted_switches = 0;
  double sea_current_peak = 0.0;
  double pea_current_peak = 0.0;
  double sea_current_rms = 0.0;
  double pea_current_rms = 0.0;
  double sea_tracking_rms = 0.0;
  double pea_tracking_rms = 0.0;
  bool all_completed = false;
};

struct TrackingRun {
  Trace trace;
  TrackingReport report;
};

TrackingRun run_dynamic_switching(const Preset& preset, const TrackingConfig& config = {});

// ---------------------------------------------------------------------------
// Impact disturbance while holding horizontal

enum class MeasuredSide { output, motor };

struct DisturbanceConfig {
  int impacts = 0;  // 0 selects the default: 6 in SEA, 5 in PEA
  double gain = 30.0;
  double hold_angle = 0.0;
  double pulse_torque = 0.0;  // 0 selects default_pulse_torque
  double pulse_duration = 0.010;
  // Each impact waits at least this long after the previous one (or after
  // start), then until the arm is at rest; `max_wait` more seconds at most.
  double settle_before = 3.0;
  double impact_interval = 4.0;
  double max_wait = 30.0;
  double rest_window = 0.5;                     // s
  double rest_tolerance = deg_to_rad(0.02);     // peak-to-peak drift over the window
  double rest_speed = 0.005;                    // rad/s, both sides
  double band = deg_to_rad(0.5);
  MeasuredSide side = MeasuredSide::output;
  /// In PEA, anchor the spring so that it carries the arm at the hold angle.
  bool balance_gravity_in_pea = true;
  std::size_t trace_stride = 1;
};

/// Output-side pulse fitted once against the SEA peak deflection with the
/// calibrated preset (dtea-calibrate) and reused for both topologies.
inline constexpr double default_pulse_torque = 7.02;

struct ImpactResult {
  double impact_time = 0.0;
  double reference = 0.0;  // rad
  double peak_deg = 0.0;
  std::optional<double> settling_ms;
  int zero_crossings = 0;  // before settling
  double oscillation_hz = 0.0;  // from zero-crossing spacing, 0 if < 3 crossings
};

struct DisturbanceReport {
  Mode mode = Mode::sea;
  MeasuredSide side = MeasuredSide::output;
  std::vector<ImpactResult> impacts;
  double mean_peak_deg = 0.0;
  std::optional<double> mean_settling_ms;  // nullopt if any impact never settled
  double pulse_torque = 0.0;
};

struct DisturbanceRun {
  Trace trace;
  DisturbanceReport report;
};

DisturbanceRun run_disturbance(Mode mode, const Preset& preset,
                               const DisturbanceConfig& config = {});

// ---------------------------------------------------------------------------
// Switching endurance

struct CycleConfig {
  int cycles = 324;
  double gain = 30.0;
  double hold_angle = 0.0;
  double dwell = 0.5;  // time engaged between switches, s
  SwitchPolicy policy;
  std::size_t trace_stride = 80;  // 100 Hz trace
};

struct CycleReport {
  int requested = 0;
  int completed = 0;
  int rejected = 0;
  int retries = 0;  // gate evaluations that rejected
  int assisted = 0;
  int violations = 0;
  double max_energy_loss = 0.0;
  double max_latency_error = 0.0;
  double max_engaged_spring_torque = 0.0;
  std::vector<SwitchRecord> switches;
};

struct CycleRun {
  Trace trace;
  CycleReport report;
};

/// Throws InvariantViolation on the first broken selector invariant.
CycleRun run_switch_cycle(const Preset& preset, const CycleConfig& config = {});

class InvariantViolation : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// ---------------------------------------------------------------------------
// Static equilibria under a P position hold

/// SEA state at rest holding `target` with gain `gain` against gravity.
SeaState sea_hold_equilibrium(double target, double gain, const Preset& preset,
                              const HubModel& hub);

/// PEA state at rest holding `target`. With `balance_gravity` the anchor is
/// placed so that the spring alone carries the arm at the target.
PeaState pea_hold_equilibrium(double target, double gain, bool balance_gravity,
                              const Preset& preset, const HubModel& hub);

/// Hub model used by the dynamic protocols: linear with the configured K_s.
HubModel dynamics_hub(const Preset& preset);

}  // namespace dtea
