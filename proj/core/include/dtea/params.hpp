#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtea {

/// Engaged actuator topology.
enum class Mode { sea, pea };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);
Mode other(Mode mode);

/// Thrown for invalid configuration (bad preset, unknown name, bad file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the installed spring length is referenced.
///
/// `free_length`: installed length = free length + preload extension. This is
/// the default and reproduces the ~5.8 Nm/rad analytical hub stiffness.
/// `hook_distance`: installed length = collinear hook distance + preload
/// extension (a literal reading that gives ~5.1 Nm/rad).
enum class PreloadReference { free_length, hook_distance };

/// Radial spring hub geometry. Lengths in mm, spring rate in N/mm.
struct HubGeometry {
  double spring_rate = 12.701;  // N/mm per spring
  double free_length = 12.8;    // mm
  double inner_radius = 25.32;  // mm
  double outer_radius = 37.87;  // mm
  double preload_extension = 1.75;  // mm
  PreloadReference preload_reference = PreloadReference::free_length;
  int spring_count = 4;

  bool operator==(const HubGeometry&) const = default;
};

/// Physical and switching parameters of the actuator, SI units.
struct ActuatorParams {
  double motor_inertia = 5.0e-4;       // kg m^2
  double output_inertia = 0.0622;      // kg m^2
  double hub_stiffness = 5.57;         // Nm/rad
  double structural_stiffness = 2.97;  // Nm/rad, locked-output PEA path only
  double motor_damping = 0.0;          // Nm s/rad
  double output_damping = 0.0;         // Nm s/rad
  double coulomb_sea = 0.0;            // Nm
  double coulomb_pea = 0.0;            // Nm
  double friction_velocity = 1.0e-3;   // rad/s, tanh regularization width
  double torque_constant = 0.083;      // Nm/A
  double torque_limit = 5.0;           // Nm
  double disengage_torque = 1.0;       // Nm
  double switch_latency = 0.025;       // s
  double dt = 1.0 / 8000.0;            // s

  // Selector tooth counts. Engagement is modeled at arbitrary angles, so these
  // are carried for reference only.
  int outer_race_teeth = 32;
  int inner_race_teeth = 16;

  bool operator==(const ActuatorParams&) const = default;
};

/// Point-mass arm under gravity. Angle zero is horizontal.
struct LoadModel {
  double mass = 0.920;    // kg
  double radius = 0.26;   // m
  double gravity = 9.81;  // m/s^2
  bool zero_is_horizontal = true;

  bool operator==(const LoadModel&) const = default;
};

struct Preset {
  std::string name;
  ActuatorParams params;
  HubGeometry hub;
  LoadModel load;

  bool operator==(const Preset&) const = default;
};

/// Every violated invariant, one message per violation. Empty means valid.
std::vector<std::string> validate(const Preset& preset);

/// Throws ConfigError listing every violation.
void require_valid(const Preset& preset);

/// Point-mass inertia of the load arm, mass * radius^2.
double default_output_inertia(const LoadModel& load);

// Named presets. Both "paper-*" presets carry nominal light damping; the
// "calibrated" preset holds damping and friction tuned against the measured
// hysteresis and disturbance response.
Preset paper_linear_window();
Preset paper_full_range();
Preset calibrated();

std::vector<std::string> builtin_preset_names();
std::optional<Preset> builtin_preset(std::string_view name);

/// Same preset with all damping and Coulomb friction removed.
Preset frictionless(Preset preset);

}  // namespace dtea
