#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dtea/io.hpp"

namespace dtea {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 36;
constexpr int kPanelGap = 28;
constexpr int kMarginBottom = 40;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed precision keeps the file compact and byte-stable.
std::string px(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.setf(std::ios::fixed);
  ss.precision(2);
  ss << v;
  return ss.str();
}

std::string tick_label(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(4);
  ss << (std::abs(v) < 1e-12 ? 0.0 : v);
  return ss.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void pad() {
    if (!std::isfinite(lo)) {
      lo = -1.0;
      hi = 1.0;
      return;
    }
    const double span = hi - lo;
    const double margin = span > 0.0 ? 0.05 * span : std::max(1e-9, std::abs(lo) * 0.05 + 1e-3);
    lo -= margin;
    hi += margin;
  }
};

const char* band_color(ModeTag m) {
  switch (m) {
    case ModeTag::sea: return "#dbe9f6";
    case ModeTag::pea: return "#fde2cf";
    case ModeTag::transition: break;
  }
  return "#eeeeee";
}

}  // namespace

std::string render_svg_plot(const std::vector<double>& time, const std::vector<PlotPanel>& panels,
                            const std::vector<ModeBand>& bands, const PlotStyle& style) {
  if (time.size() < 2) throw std::invalid_argument("plot: need at least two time samples");
  if (panels.empty()) throw std::invalid_argument("plot: no panels");
  for (const auto& panel : panels) {
    if (panel.series.empty()) throw std::invalid_argument("plot: panel '" + panel.y_label + "' has no series");
    for (const auto& s : panel.series) {
      if (s.values.size() != time.size()) {
        throw std::invalid_argument("plot: series '" + s.label + "' length does not match time");
      }
    }
  }

  const double t0 = time.front();
  const double t1 = time.back() > t0 ? time.back() : t0 + 1.0;
  const int plot_w = style.width - kMarginLeft - kMarginRight;
  const int n = static_cast<int>(panels.size());
  const int height = kMarginTop + n * style.panel_height + (n - 1) * kPanelGap + kMarginBottom;
  auto x_of = [&](double t) { return kMarginLeft + (t - t0) / (t1 - t0) * plot_w; };

  // Thin dense traces to about two points per horizontal pixel.
  const std::size_t stride = std::max<std::size_t>(1, time.size() / (2 * static_cast<std::size_t>(plot_w)));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    svg << "<text x=\"" << style.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(style.title) << "</text>\n";
  }

  for (int p = 0; p < n; ++p) {
    const auto& panel = panels[static_cast<std::size_t>(p)];
    const int top = kMarginTop + p * (style.panel_height + kPanelGap);
    const int bottom = top + style.panel_height;

    Range yr;
    for (const auto& s : panel.series) {
      for (double v : s.values) yr.include(v);
    }
    yr.pad();
    auto y_of = [&](double v) { return bottom - (v - yr.lo) / (yr.hi - yr.lo) * style.panel_height; };

    for (const auto& b : bands) {
      if (b.mode == ModeTag::transition) continue;
      const double xa = x_of(std::clamp(b.t_start, t0, t1));
      const double xb = x_of(std::clamp(b.t_end, t0, t1));
      if (xb <= xa) continue;
      svg << "<rect x=\"" << px(xa) << "\" y=\"" << top << "\" width=\"" << px(xb - xa)
          << "\" height=\"" << style.panel_height << "\" fill=\"" << band_color(b.mode) << "\"/>\n";
    }

    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << style.panel_height << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double v = yr.lo + (yr.hi - yr.lo) * k / 4.0;
      const double y = y_of(v);
      svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << px(y) << "\" x2=\"" << kMarginLeft
          << "\" y2=\"" << px(y) << "\" stroke=\"#444\"/>\n";
      svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << px(y + 4)
          << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
    svg << "<text transform=\"translate(14," << (top + bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

    for (const auto& s : panel.series) {
      svg << "<polyline fill=\"none\" stroke=\"" << escape(s.color)
          << "\" stroke-width=\"1\" points=\"";
      for (std::size_t i = 0; i < time.size(); i += stride) {
        if (!std::isfinite(s.values[i])) continue;
        svg << px(x_of(time[i])) << ',' << px(y_of(s.values[i])) << ' ';
      }
      svg << "\"/>\n";
    }

    int legend_x = kMarginLeft + 8;
    for (const auto& s : panel.series) {
      if (s.label.empty()) continue;
      svg << "<line x1=\"" << legend_x << "\" y1=\"" << top + 12 << "\" x2=\"" << legend_x + 16
          << "\" y2=\"" << top + 12 << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << legend_x + 20 << "\" y=\"" << top + 16 << "\">" << escape(s.label)
          << "</text>\n";
      legend_x += 30 + 7 * static_cast<int>(s.label.size());
    }
  }

  const int axis_y = kMarginTop + n * style.panel_height + (n - 1) * kPanelGap;
  for (int k = 0; k <= 5; ++k) {
    const double t = t0 + (t1 - t0) * k / 5.0;
    const double x = x_of(t);
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << axis_y << "\" x2=\"" << px(x) << "\" y2=\""
        << axis_y + 4 << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << px(x) << "\" y=\"" << axis_y + 16 << "\" text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << axis_y + 32
      << "\" text-anchor=\"middle\">time (s)</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg_plot(const std::vector<double>& time, const std::vector<PlotPanel>& panels,
                   const std::vector<ModeBand>& bands, const std::filesystem::path& path,
                   const PlotStyle& style) {
  write_text_file(path, render_svg_plot(time, panels, bands, style));
}

std::vector<ModeBand> mode_bands(const Trace& trace) {
  std::vector<ModeBand> bands;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& r = trace.rows[i];
    const double t_end = r.t + trace.sample_period;
    if (!bands.empty() && bands.back().mode == r.mode) {
      bands.back().t_end = t_end;
    } else {
      bands.push_back({r.t, t_end, r.mode});
    }
  }
  std::erase_if(bands, [](const ModeBand& b) { return b.mode == ModeTag::transition; });
  return bands;
}

}  // namespace dtea
