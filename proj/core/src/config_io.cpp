#include <fstream>
#include <set>
#include <sstream>

#include "dtea/io.hpp"
#include "json.hpp"

namespace dtea {

using nlohmann::ordered_json;

namespace {

// Reads `key` into `field` if present; remembers which keys were consumed.
class Reader {
 public:
  Reader(const ordered_json& obj, std::string section) : obj_(obj), section_(std::move(section)) {
    if (!obj_.is_object()) throw ConfigError(section_ + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& field) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      field = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(section_ + "." + key + ": wrong type");
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(section_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const ordered_json& obj_;
  std::string section_;
  std::set<std::string> seen_;
};

ordered_json params_json(const ActuatorParams& p) {
  return {{"motor_inertia", p.motor_inertia},
          {"output_inertia", p.output_inertia},
          {"hub_stiffness", p.hub_stiffness},
          {"structural_stiffness", p.structural_stiffness},
          {"motor_damping", p.motor_damping},
          {"output_damping", p.output_damping},
          {"coulomb_sea", p.coulomb_sea},
          {"coulomb_pea", p.coulomb_pea},
          {"friction_velocity", p.friction_velocity},
          {"torque_constant", p.torque_constant},
          {"torque_limit", p.torque_limit},
          {"disengage_torque", p.disengage_torque},
          {"switch_latency", p.switch_latency},
          {"dt", p.dt},
          {"outer_race_teeth", p.outer_race_teeth},
          {"inner_race_teeth", p.inner_race_teeth}};
}

ordered_json hub_json(const HubGeometry& h) {
  return {{"spring_rate", h.spring_rate},
          {"free_length", h.free_length},
          {"inner_radius", h.inner_radius},
          {"outer_radius", h.outer_radius},
          {"preload_extension", h.preload_extension},
          {"preload_reference",
           h.preload_reference == PreloadReference::free_length ? "free_length" : "hook_distance"},
          {"spring_count", h.spring_count}};
}

ordered_json load_json(const LoadModel& l) {
  return {{"mass", l.mass},
          {"radius", l.radius},
          {"gravity", l.gravity},
          {"zero_is_horizontal", l.zero_is_horizontal}};
}

ordered_json header(const char* kind, const Preset& preset) {
  return {{"schema_version", kSchemaVersion}, {"kind", kind}, {"preset", preset.name}};
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json switches_json(const std::vector<SwitchRecord>& records) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : records) {
    arr.push_back({{"request_time", r.request_time},
                   {"engage_time", r.engage_time},
                   {"from", to_string(r.from)},
                   {"to", to_string(r.to)},
                   {"transmitted_torque", r.transmitted_torque},
                   {"outcome", r.outcome == SwitchOutcome::completed ? "completed" : "rejected"},
                   {"energy_loss", r.energy_loss}});
  }
  return arr;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string preset_to_json(const Preset& preset) {
  ordered_json j = {{"schema_version", kSchemaVersion},
                    {"name", preset.name},
                    {"actuator", params_json(preset.params)},
                    {"hub", hub_json(preset.hub)},
                    {"load", load_json(preset.load)}};
  return dump(j);
}

Preset preset_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("preset: malformed JSON: ") + e.what());
  }
  Preset preset;
  Reader top(j, "preset");
  int version = 0;
  top.read("schema_version", version);
  if (version != kSchemaVersion) {
    throw ConfigError("preset: unsupported schema_version " + std::to_string(version));
  }
  top.read("name", preset.name);
  ordered_json actuator = ordered_json::object();
  ordered_json hub = ordered_json::object();
  ordered_json load = ordered_json::object();
  top.read("actuator", actuator);
  top.read("hub", hub);
  top.read("load", load);
  top.finish();

  auto& p = preset.params;
  Reader a(actuator, "actuator");
  a.read("motor_inertia", p.motor_inertia);
  a.read("output_inertia", p.output_inertia);
  a.read("hub_stiffness", p.hub_stiffness);
  a.read("structural_stiffness", p.structural_stiffness);
  a.read("motor_damping", p.motor_damping);
  a.read("output_damping", p.output_damping);
  a.read("coulomb_sea", p.coulomb_sea);
  a.read("coulomb_pea", p.coulomb_pea);
  a.read("friction_velocity", p.friction_velocity);
  a.read("torque_constant", p.torque_constant);
  a.read("torque_limit", p.torque_limit);
  a.read("disengage_torque", p.disengage_torque);
  a.read("switch_latency", p.switch_latency);
  a.read("dt", p.dt);
  a.read("outer_race_teeth", p.outer_race_teeth);
  a.read("inner_race_teeth", p.inner_race_teeth);
  a.finish();

  auto& h = preset.hub;
  Reader r(hub, "hub");
  std::string reference = "free_length";
  r.read("spring_rate", h.spring_rate);
  r.read("free_length", h.free_length);
  r.read("inner_radius", h.inner_radius);
  r.read("outer_radius", h.outer_radius);
  r.read("preload_extension", h.preload_extension);
  r.read("preload_reference", reference);
  r.read("spring_count", h.spring_count);
  r.finish();
  if (reference == "free_length") {
    h.preload_reference = PreloadReference::free_length;
  } else if (reference == "hook_distance") {
    h.preload_reference = PreloadReference::hook_distance;
  } else {
    throw ConfigError("hub.preload_reference: expected free_length or hook_distance");
  }

  auto& l = preset.load;
  Reader lr(load, "load");
  lr.read("mass", l.mass);
  lr.read("radius", l.radius);
  lr.read("gravity", l.gravity);
  lr.read("zero_is_horizontal", l.zero_is_horizontal);
  lr.finish();
  return preset;
}

void save_preset(const Preset& preset, const std::filesystem::path& path) {
  write_text_file(path, preset_to_json(preset));
}

Preset load_preset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open preset file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return preset_from_json(ss.str());
}

Preset resolve_preset(std::string_view name_or_path) {
  if (auto builtin = builtin_preset(name_or_path)) return *builtin;
  const std::filesystem::path path(name_or_path);
  if (std::filesystem::exists(path)) return load_preset(path);
  std::string msg = "unknown preset '" + std::string(name_or_path) + "' (built-in:";
  for (const auto& n : builtin_preset_names()) msg += " " + n;
  throw ConfigError(msg + ")");
}

std::string report_to_json(const StiffnessReport& r, const Preset& preset) {
  auto j = header("stiffness", preset);
  j["mode"] = to_string(r.mode);
  j["stiffness"] = r.stiffness;
  j["stiffness_stderr"] = r.stiffness_stderr;
  j["intercept"] = r.intercept;
  j["expected_stiffness"] = r.expected_stiffness;
  j["loop_area"] = r.loop_area;
  j["cycle_loop_areas"] = r.cycle_loop_areas;
  j["cycle_stiffness"] = r.cycle_stiffness;
  j["sample_count"] = r.sample_count;
  return dump(j);
}

std::string report_to_json(const TrackingReport& r, const Preset& preset) {
  auto j = header("track", preset);
  ordered_json segs = ordered_json::array();
  for (const auto& s : r.segments) {
    segs.push_back({{"mode", to_string(s.mode)},
                    {"t_start", s.t_start},
                    {"t_end", s.t_end},
                    {"current_rms", s.current_rms},
                    {"current_peak", s.current_peak},
                    {"tracking_rms", s.tracking_rms}});
  }
  j["segments"] = segs;
  j["switches"] = switches_json(r.switches);
  j["all_completed"] = r.all_completed;
  j["gate_rejections"] = r.gate_rejections;
  j["assisted_switches"] = r.assisted_switches;
  j["sea"] = {{"current_peak", r.sea_current_peak},
              {"current_rms", r.sea_current_rms},
              {"tracking_rms", r.sea_tracking_rms}};
  j["pea"] = {{"current_peak", r.pea_current_peak},
              {"current_rms", r.pea_current_rms},
              {"tracking_rms", r.pea_tracking_rms}};
  return dump(j);
}

std::string report_to_json(const DisturbanceReport& r, const Preset& preset) {
  auto j = header("disturb", preset);
  j["mode"] = to_string(r.mode);
  j["measured_side"] = r.side == MeasuredSide::output ? "output" : "motor";
  j["pulse_torque"] = r.pulse_torque;
  ordered_json impacts = ordered_json::array();
  for (const auto& i : r.impacts) {
    impacts.push_back({{"impact_time", i.impact_time},
                       {"reference", i.reference},
                       {"peak_deg", i.peak_deg},
                       {"settling_ms", optional_number(i.settling_ms)},
                       {"zero_crossings", i.zero_crossings},
                       {"oscillation_hz", i.oscillation_hz}});
  }
  j["impacts"] = impacts;
  j["mean_peak_deg"] = r.mean_peak_deg;
  j["mean_settling_ms"] = optional_number(r.mean_settling_ms);
  return dump(j);
}

std::string report_to_json(const CycleReport& r, const Preset& preset) {
  auto j = header("cycle", preset);
  j["requested"] = r.requested;
  j["completed"] = r.completed;
  j["rejected"] = r.rejected;
  j["retries"] = r.retries;
  j["assisted"] = r.assisted;
  j["violations"] = r.violations;
  j["max_energy_loss"] = r.max_energy_loss;
  j["max_latency_error"] = r.max_latency_error;
  j["max_engaged_spring_torque"] = r.max_engaged_spring_torque;
  j["switches"] = switches_json(r.switches);
  return dump(j);
}

std::string hub_curve_report_to_json(const Preset& preset, double linearized_stiffness,
                                     double fd_slope) {
  auto j = header("hub-curve", preset);
  j["linearized_stiffness"] = linearized_stiffness;
  j["finite_difference_slope"] = fd_slope;
  j["hub"] = hub_json(preset.hub);
  return dump(j);
}

}  // namespace dtea
