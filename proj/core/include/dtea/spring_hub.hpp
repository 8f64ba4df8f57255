#pragma once

#include "dtea/params.hpp"

namespace dtea {

enum class HubMode { nonlinear, linearized };

/// Torque model of the radial spring hub: four extension springs hooked
/// between an inner plate (radius r1) and an outer plate (radius r2), spaced
/// evenly around the shaft. Angles in rad, lengths in mm, torques in Nm.
///
/// The hooks of the prototype sit closer together (r2 - r1) than the spring
/// free length, so the springs are held at their installed length by a
/// constant assembly offset added to the hook-to-hook distance. With that
/// offset the nonlinear model linearizes exactly to linearized_stiffness().
class HubModel {
 public:
  /// Nonlinear torque curve from the geometry.
  static HubModel nonlinear(const HubGeometry& geometry);
  /// Linear law with the slope of the geometric model at zero deflection.
  /// Throws ConfigError when the springs are slack at equilibrium.
  static HubModel linearized(const HubGeometry& geometry);
  /// Linear law with a configured (e.g. measured) stiffness.
  static HubModel linearized(const HubGeometry& geometry, double stiffness);

  HubMode mode() const { return mode_; }
  const HubGeometry& geometry() const { return geometry_; }

  /// Hook-to-hook distance at relative plate angle beta.
  double spring_length(double beta) const;
  /// Installed length of one spring at deflection beta (hook distance plus
  /// the assembly offset).
  double effective_length(double beta) const;
  /// Installed spring length at zero deflection.
  double installed_length() const;
  /// installed_length() - spring_length(0), never negative for valid presets.
  double preload_offset() const;

  /// Restoring torque of all springs. Odd in beta.
  double torque(double beta) const;

  /// Small-deflection stiffness of the geometric model, Nm/rad.
  /// Throws ConfigError if the installed length does not exceed free length.
  double linearized_stiffness() const;

  /// Slope used in linearized mode (configured or geometric).
  double stiffness() const { return linear_stiffness_; }

  /// Preload tension of one spring, N.
  double preload_force() const;

 private:
  HubModel(const HubGeometry& geometry, HubMode mode, double linear_stiffness);

  HubGeometry geometry_;
  HubMode mode_;
  double linear_stiffness_;
};

}  // namespace dtea
