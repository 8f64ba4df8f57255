#include "dtea/params.hpp"

#include <cmath>
#include <sstream>

namespace dtea {

std::string_view to_string(Mode mode) { return mode == Mode::sea ? "sea" : "pea"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "sea" || text == "SEA") return Mode::sea;
  if (text == "pea" || text == "PEA") return Mode::pea;
  return std::nullopt;
}

Mode other(Mode mode) { return mode == Mode::sea ? Mode::pea : Mode::sea; }

namespace {

class Checker {
 public:
  void positive(std::string_view field, double value) {
    if (!(std::isfinite(value) && value > 0.0)) fail(field, "must be positive", value);
  }
  void non_negative(std::string_view field, double value) {
    if (!(std::isfinite(value) && value >= 0.0)) fail(field, "must be non-negative", value);
  }
  void fail(std::string_view field, std::string_view what, double value) {
    std::ostringstream os;
    os << field << ' ' << what << " (got " << value << ')';
    errors.push_back(os.str());
  }
  std::vector<std::string> errors;
};

}  // namespace

std::vector<std::string> validate(const Preset& preset) {
  Checker c;
  const auto& h = preset.hub;
  c.positive("hub.spring_rate", h.spring_rate);
  c.positive("hub.free_length", h.free_length);
  c.positive("hub.inner_radius", h.inner_radius);
  c.positive("hub.outer_radius", h.outer_radius);
  if (std::isfinite(h.inner_radius) && std::isfinite(h.outer_radius) &&
      !(h.inner_radius < h.outer_radius)) {
    std::ostringstream os;
    os << "hub.inner_radius < hub.outer_radius required (got " << h.inner_radius
       << " >= " << h.outer_radius << ')';
    c.errors.push_back(os.str());
  }
  c.non_negative("hub.preload_extension", h.preload_extension);
  if (h.spring_count < 1) c.fail("hub.spring_count", "must be at least 1", h.spring_count);

  const auto& p = preset.params;
  c.positive("motor_inertia", p.motor_inertia);
  c.positive("output_inertia", p.output_inertia);
  c.positive("hub_stiffness", p.hub_stiffness);
  c.positive("structural_stiffness", p.structural_stiffness);
  c.non_negative("motor_damping", p.motor_damping);
  c.non_negative("output_damping", p.output_damping);
  c.non_negative("coulomb_sea", p.coulomb_sea);
  c.non_negative("coulomb_pea", p.coulomb_pea);
  c.positive("friction_velocity", p.friction_velocity);
  c.positive("torque_constant", p.torque_constant);
  c.positive("torque_limit", p.torque_limit);
  c.non_negative("disengage_torque", p.disengage_torque);
  c.non_negative("switch_latency", p.switch_latency);
  c.positive("dt", p.dt);
  if (std::isfinite(p.dt) && p.dt > 0.0 && std::isfinite(p.switch_latency) &&
      p.switch_latency > 0.0 && p.switch_latency < p.dt) {
    c.fail("switch_latency", "must be zero or at least one dt", p.switch_latency);
  }

  const auto& l = preset.load;
  c.non_negative("load.mass", l.mass);
  c.non_negative("load.radius", l.radius);
  c.positive("load.gravity", l.gravity);
  if (!l.zero_is_horizontal) {
    c.errors.emplace_back("load.zero_is_horizontal must be true (only supported convention)");
  }
  return c.errors;
}

void require_valid(const Preset& preset) {
  const auto errors = validate(preset);
  if (errors.empty()) return;
  std::string msg = "invalid preset '" + preset.name + "':";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

double default_output_inertia(const LoadModel& load) {
  return load.mass * load.radius * load.radius;
}

namespace {

Preset paper_base(std::string name, double hub_stiffness, double structural_stiffness) {
  Preset preset;
  preset.name = std::move(name);
  preset.params.output_inertia = default_output_inertia(preset.load);
  preset.params.hub_stiffness = hub_stiffness;
  preset.params.structural_stiffness = structural_stiffness;
  // Nominal light dissipation; see calibrated() for fitted values.
  preset.params.motor_damping = 0.05;
  preset.params.output_damping = 0.05;
  preset.params.coulomb_sea = 0.02;
  preset.params.coulomb_pea = 0.01;
  return preset;
}

}  // namespace

Preset paper_linear_window() { return paper_base("paper-linear-window", 4.09, 4.40); }

Preset paper_full_range() { return paper_base("paper-full-range", 5.57, 2.97); }

Preset calibrated() {
  Preset preset = paper_full_range();
  preset.name = "calibrated";
  // Output of dtea-calibrate (tools/calibrate.cpp), rounded to 0.005.
  preset.params.motor_damping = 0.13;
  preset.params.output_damping = 0.20;
  preset.params.coulomb_sea = 0.11;
  preset.params.coulomb_pea = 0.05;
  return preset;
}

std::vector<std::string> builtin_preset_names() {
  return {"paper-linear-window", "paper-full-range", "calibrated"};
}

std::optional<Preset> builtin_preset(std::string_view name) {
  if (name == "paper-linear-window") return paper_linear_window();
  if (name == "paper-full-range") return paper_full_range();
  if (name == "calibrated") return calibrated();
  return std::nullopt;
}

Preset frictionless(Preset preset) {
  preset.params.motor_damping = 0.0;
  preset.params.output_damping = 0.0;
  preset.params.coulomb_sea = 0.0;
  preset.params.coulomb_pea = 0.0;
  return preset;
}

}  // namespace dtea
