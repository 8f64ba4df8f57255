#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtea/experiments.hpp"
#include "dtea/params.hpp"

namespace dtea {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kTraceHeader =
    "t,mode,theta_m,omega_m,theta_o,omega_o,tau_cmd,tau_applied,tau_spring,i_q";

// ---------------------------------------------------------------------------
// Traces

/// Writes the trace as CSV (angles in rad). With `decimate_to_hz`, keeps every
/// k-th row where k = round(sample_rate / target). Returns data rows written.
std::size_t write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                            std::optional<double> decimate_to_hz = std::nullopt);

/// Same format to a string; shares the formatter with write_trace_csv.
std::string format_trace_csv(const Trace& trace,
                             std::optional<double> decimate_to_hz = std::nullopt);

Trace read_trace_csv(const std::filesystem::path& path);
Trace parse_trace_csv(std::string_view text);

/// Locale-independent shortest round-trip formatting of a double.
std::string format_number(double value);

/// Output encoder model: quantization to the encoder grid, then Gaussian
/// noise. Angles in degrees.
struct NoiseModel {
  bool enabled = false;
  double quantization_deg = 360.0 / 16384.0;
  double sigma_deg = 0.033;
  std::uint64_t seed = 0;
};

/// Perturbs the output angle column only. Deterministic for a given seed.
Trace apply_noise(const Trace& trace, const NoiseModel& model);

// ---------------------------------------------------------------------------
// Presets and reports (JSON, with schema_version)

std::string preset_to_json(const Preset& preset);
Preset preset_from_json(std::string_view text);
void save_preset(const Preset& preset, const std::filesystem::path& path);
Preset load_preset(const std::filesystem::path& path);

/// Built-in name or path to a preset file.
Preset resolve_preset(std::string_view name_or_path);

std::string report_to_json(const StiffnessReport& report, const Preset& preset);
std::string report_to_json(const TrackingReport& report, const Preset& preset);
std::string report_to_json(const DisturbanceReport& report, const Preset& preset);
std::string report_to_json(const CycleReport& report, const Preset& preset);
std::string hub_curve_report_to_json(const Preset& preset, double linearized_stiffness,
                                     double fd_slope);

void write_text_file(const std::filesystem::path& path, std::string_view text);

// ---------------------------------------------------------------------------
// SVG plots

struct PlotSeries {
  std::string label;
  std::vector<double> values;
  std::string color = "#1f77b4";
};

struct PlotPanel {
  std::string y_label;
  std::vector<PlotSeries> series;
};

struct ModeBand {
  double t_start = 0.0;
  double t_end = 0.0;
  ModeTag mode = ModeTag::sea;
};

struct PlotStyle {
  std::string title;
  int width = 900;
  int panel_height = 220;
};

/// Stacked time-series panels sharing the time axis, with SEA/PEA shading.
/// Throws std::invalid_argument when there is nothing to plot.
void emit_svg_plot(const std::vector<double>& time, const std::vector<PlotPanel>& panels,
                   const std::vector<ModeBand>& bands, const std::filesystem::path& path,
                   const PlotStyle& style = {});

std::string render_svg_plot(const std::vector<double>& time,
                            const std::vector<PlotPanel>& panels,
                            const std::vector<ModeBand>& bands, const PlotStyle& style = {});

/// Maximal runs of SEA and PEA rows (transitions are left unshaded).
std::vector<ModeBand> mode_bands(const Trace& trace);

}  // namespace dtea
