#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"
#include "dtea/experiments.hpp"
#include "dtea/io.hpp"

namespace dtea::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string preset = "calibrated";
  std::string out = "out";
  std::uint64_t seed = 0;
  bool noise = false;
  bool plot = false;
  double decimate_hz = 0.0;
};

void add_common(CLI::App& sub, Common& c, bool simulated = true) {
  sub.add_option("--preset", c.preset, "Built-in preset name or path to a preset JSON file")
      ->capture_default_str();
  sub.add_option("--out", c.out, "Output directory for trace.csv, report.json, plot.svg")
      ->capture_default_str();
  if (!simulated) return;  // the hub sweep has no time axis to noise, thin or plot
  sub.add_option("--seed", c.seed, "Seed for the encoder noise model")->capture_default_str();
  sub.add_flag("--noise", c.noise, "Quantize and perturb the logged output angle");
  sub.add_option("--decimate", c.decimate_hz, "Log the trace at this rate (Hz) instead of every step")
      ->check(CLI::NonNegativeNumber);
  sub.add_flag("--plot", c.plot, "Also write plot.svg");
}

void add_mode(CLI::App& sub, std::string& mode) {
  sub.add_option("--mode", mode, "Engaged topology")
      ->required()
      ->transform(CLI::IsMember({"sea", "pea"}, CLI::ignore_case));
}

Mode mode_of(const std::string& text) { return *parse_mode(text); }

void write_outputs(const Common& c, const Trace& trace, const std::string& report) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  NoiseModel noise;
  noise.enabled = c.noise;
  noise.seed = c.seed;
  const std::optional<double> rate = c.decimate_hz > 0.0 ? std::optional(c.decimate_hz) : std::nullopt;
  write_trace_csv(apply_noise(trace, noise), dir / "trace.csv", rate);
  write_text_file(dir / "report.json", report);
}

std::vector<double> times(const Trace& trace) {
  std::vector<double> t;
  t.reserve(trace.rows.size());
  for (const auto& r : trace.rows) t.push_back(r.t);
  return t;
}

template <class F>
PlotSeries series(const Trace& trace, std::string label, std::string color, F&& field) {
  PlotSeries s{std::move(label), {}, std::move(color)};
  s.values.reserve(trace.rows.size());
  for (const auto& r : trace.rows) s.values.push_back(field(r));
  return s;
}

void write_plot(const Common& c, const Trace& trace, std::string title,
                std::vector<PlotPanel> panels) {
  if (!c.plot) return;
  PlotStyle style;
  style.title = std::move(title);
  emit_svg_plot(times(trace), panels, mode_bands(trace), fs::path(c.out) / "plot.svg", style);
}

std::vector<PlotPanel> angle_and_torque_panels(const Trace& trace) {
  return {
      {"angle (deg)",
       {series(trace, "motor", "#1f77b4", [](const TraceRow& r) { return rad_to_deg(r.motor_angle); }),
        series(trace, "output", "#d62728", [](const TraceRow& r) { return rad_to_deg(r.output_angle); })}},
      {"torque (Nm)",
       {series(trace, "motor", "#1f77b4", [](const TraceRow& r) { return r.tau_applied; }),
        series(trace, "spring", "#2ca02c", [](const TraceRow& r) { return r.tau_spring; })}},
  };
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-topology elastic actuator simulator", "dtea"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dtea 0.1.0");

  std::function<void()> action;
  out << std::setprecision(6);

  // stiffness ----------------------------------------------------------------
  Common stiff_common;
  std::string stiff_mode;
  StiffnessConfig stiff_cfg;
  std::string hub_kind = "linearized";
  bool frictionless_run = false;
  auto* stiff = app.add_subcommand("stiffness", "Locked-output torque cycle and stiffness fit");
  add_common(*stiff, stiff_common);
  add_mode(*stiff, stiff_mode);
  stiff->add_option("--cycles", stiff_cfg.profile.cycles, "Torque cycles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  stiff->add_option("--peak", stiff_cfg.profile.peak, "Peak torque (Nm)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  stiff->add_option("--rate", stiff_cfg.profile.ramp_rate, "Torque ramp rate (Nm/s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  stiff->add_option("--hub", hub_kind, "Hub model used for the spring path")
      ->check(CLI::IsMember({"linearized", "nonlinear"}))
      ->capture_default_str();
  stiff->add_flag("--frictionless", frictionless_run, "Remove damping and Coulomb friction");
  stiff->callback([&] {
    action = [&] {
      Preset preset = resolve_preset(stiff_common.preset);
      if (frictionless_run) preset = frictionless(preset);
      stiff_cfg.hub_mode = hub_kind == "nonlinear" ? HubMode::nonlinear : HubMode::linearized;
      const auto run = run_static_stiffness(mode_of(stiff_mode), preset, stiff_cfg);
      write_outputs(stiff_common, run.trace, report_to_json(run.report, preset));
      write_plot(stiff_common, run.trace, "Locked-output stiffness (" + stiff_mode + ")",
                 angle_and_torque_panels(run.trace));
      const auto& r = run.report;
      out << to_string(r.mode) << " stiffness " << r.stiffness << " Nm/rad (expected "
          << r.expected_stiffness << "), loop area " << r.loop_area << " Nm rad\n";
    };
  });

  // track --------------------------------------------------------------------
  Common track_common;
  TrackingConfig track_cfg;
  double amplitude_deg = rad_to_deg(track_cfg.amplitude);
  auto* track = app.add_subcommand("track", "Sinusoid tracking with periodic topology switches");
  add_common(*track, track_common);
  track->add_option("--duration", track_cfg.duration, "Tracking duration (s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track->add_option("--period", track_cfg.switch_period, "Time between switch requests (s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track->add_option("--gain", track_cfg.gain, "Position gain (Nm/rad)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track->add_option("--amplitude", amplitude_deg, "Target amplitude (deg)")->capture_default_str();
  track->add_option("--frequency", track_cfg.frequency, "Target frequency (Hz)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  track->callback([&] {
    action = [&] {
      const Preset preset = resolve_preset(track_common.preset);
      track_cfg.amplitude = deg_to_rad(amplitude_deg);
      const auto run = run_dynamic_switching(preset, track_cfg);
      write_outputs(track_common, run.trace, report_to_json(run.report, preset));
      auto panels = angle_and_torque_panels(run.trace);
      panels.push_back({"current (A)", {series(run.trace, "i_q", "#9467bd", [](const TraceRow& r) {
                                          return r.current;
                                        })}});
      write_plot(track_common, run.trace, "Tracking with topology switches", std::move(panels));
      const auto& r = run.report;
      const auto count = cycle_counter(r.switches);
      out << count.completed << " switches completed, " << count.rejected << " rejected ("
          << r.assisted_switches << " needed unloading)\n"
          << "peak current SEA " << r.sea_current_peak << " A, PEA " << r.pea_current_peak << " A\n"
          << "tracking RMS SEA " << rad_to_deg(r.sea_tracking_rms) << " deg, PEA "
          << rad_to_deg(r.pea_tracking_rms) << " deg\n";
    };
  });

  // disturb ------------------------------------------------------------------
  Common dist_common;
  std::string dist_mode;
  DisturbanceConfig dist_cfg;
  double pulse_ms = dist_cfg.pulse_duration * 1000.0;
  std::string side = "output";
  auto* dist = app.add_subcommand("disturb", "Impact rejection while holding horizontal");
  add_common(*dist, dist_common);
  add_mode(*dist, dist_mode);
  dist->add_option("--impacts", dist_cfg.impacts, "Number of impacts (default 6 in SEA, 5 in PEA)")
      ->check(CLI::PositiveNumber);
  dist->add_option("--pulse", dist_cfg.pulse_torque, "Impact torque (Nm)");
  dist->add_option("--pulse-ms", pulse_ms, "Impact duration (ms)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dist->add_option("--gain", dist_cfg.gain, "Position gain (Nm/rad)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dist->add_option("--side", side, "Angle used for peak and settling")
      ->check(CLI::IsMember({"output", "motor"}))
      ->capture_default_str();
  dist->callback([&] {
    action = [&] {
      const Preset preset = resolve_preset(dist_common.preset);
      dist_cfg.pulse_duration = pulse_ms / 1000.0;
      dist_cfg.side = side == "motor" ? MeasuredSide::motor : MeasuredSide::output;
      const auto run = run_disturbance(mode_of(dist_mode), preset, dist_cfg);
      write_outputs(dist_common, run.trace, report_to_json(run.report, preset));
      write_plot(dist_common, run.trace, "Impact response (" + dist_mode + ")",
                 angle_and_torque_panels(run.trace));
      const auto& r = run.report;
      out << to_string(r.mode) << " " << r.impacts.size() << " impacts: mean peak " << r.mean_peak_deg
          << " deg, mean settling ";
      if (r.mean_settling_ms) {
        out << *r.mean_settling_ms << " ms\n";
      } else {
        out << "not settled\n";
      }
    };
  });

  // cycle --------------------------------------------------------------------
  Common cycle_common;
  CycleConfig cycle_cfg;
  auto* cycle = app.add_subcommand("cycle", "Switching endurance under gravity load");
  add_common(*cycle, cycle_common);
  cycle->add_option("--n", cycle_cfg.cycles, "Number of switches")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cycle->add_option("--dwell", cycle_cfg.dwell, "Engaged time between switches (s)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cycle->add_option("--gain", cycle_cfg.gain, "Position gain (Nm/rad)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cycle->callback([&] {
    action = [&] {
      const Preset preset = resolve_preset(cycle_common.preset);
      const auto run = run_switch_cycle(preset, cycle_cfg);
      write_outputs(cycle_common, run.trace, report_to_json(run.report, preset));
      write_plot(cycle_common, run.trace, "Switching endurance", angle_and_torque_panels(run.trace));
      const auto& r = run.report;
      out << r.completed << " completed, " << r.rejected << " rejected, " << r.violations
          << " violations\n"
          << "max engagement energy loss " << r.max_energy_loss << " J\n";
    };
  });

  // hub-curve ----------------------------------------------------------------
  Common hub_common;
  std::vector<double> range{-0.5, 0.5};
  int steps = 101;
  auto* curve = app.add_subcommand("hub-curve", "Sweep the nonlinear hub torque");
  add_common(*curve, hub_common, false);
  curve->add_option("--range", range, "Deflection range LO HI (rad)")->expected(2)->capture_default_str();
  curve->add_option("--steps", steps, "Grid points, at least 2")
      ->check(CLI::Range(2, 10'000'000))
      ->capture_default_str();
  curve->callback([&] {
    action = [&] {
      if (!(range[0] < range[1])) throw ConfigError("--range: LO must be less than HI");
      const Preset preset = resolve_preset(hub_common.preset);
      require_valid(preset);
      const HubModel hub = HubModel::nonlinear(preset.hub);
      std::vector<double> beta(static_cast<std::size_t>(steps));
      std::vector<double> tau(beta.size());
      std::string csv = "beta,tau_hub,l_eff\n";
      // Built about the midpoint so a symmetric range gives exact +-beta pairs.
      const double centre = 0.5 * (range[0] + range[1]);
      const double half = 0.5 * (range[1] - range[0]);
      for (std::size_t i = 0; i < beta.size(); ++i) {
        const double u = static_cast<double>(2 * static_cast<int>(i) - (steps - 1)) / (steps - 1);
        beta[i] = centre + half * u;
        tau[i] = hub.torque(beta[i]);
        csv += format_number(beta[i]) + ',' + format_number(tau[i]) + ',' +
               format_number(hub.effective_length(beta[i])) + '\n';
      }
      // First-difference slope across the grid point nearest zero.
      std::size_t nearest = 0;
      for (std::size_t i = 1; i < beta.size(); ++i) {
        if (std::abs(beta[i]) < std::abs(beta[nearest])) nearest = i;
      }
      const std::size_t lo = nearest == 0 ? 0 : nearest - 1;
      const std::size_t hi = nearest + 1 < beta.size() ? nearest + 1 : nearest;
      const double slope = (tau[hi] - tau[lo]) / (beta[hi] - beta[lo]);
      const double k_lin = hub.linearized_stiffness();

      const fs::path dir(hub_common.out);
      fs::create_directories(dir);
      write_text_file(dir / "trace.csv", csv);
      write_text_file(dir / "report.json", hub_curve_report_to_json(preset, k_lin, slope));
      out << "linearized hub stiffness " << k_lin << " Nm/rad, grid slope near 0 " << slope
          << " Nm/rad\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  try {
    action();
    return ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return simulation_error;
  } catch (const std::exception& e) {
    err << "simulation error: " << e.what() << '\n';
    return simulation_error;
  }
}

}  // namespace dtea::cli
