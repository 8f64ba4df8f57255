#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "dtea/io.hpp"

namespace dtea {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::size_t decimation_factor(const Trace& trace, std::optional<double> target_hz) {
  if (!target_hz) return 1;
  if (!(*target_hz > 0.0)) throw std::invalid_argument("decimation rate must be positive");
  const double rate = 1.0 / trace.sample_period;
  const auto k = static_cast<long long>(std::llround(rate / *target_hz));
  return k < 1 ? 1 : static_cast<std::size_t>(k);
}

const char* tag_name(ModeTag tag) { return to_string(tag); }

ModeTag parse_tag(std::string_view s) {
  if (s == "SEA") return ModeTag::sea;
  if (s == "PEA") return ModeTag::pea;
  if (s == "TRANS") return ModeTag::transition;
  throw IoError("trace csv: unknown mode tag '" + std::string(s) + "'");
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError("trace csv: bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_trace_csv(const Trace& trace, std::optional<double> decimate_to_hz) {
  const std::size_t k = decimation_factor(trace, decimate_to_hz);
  std::string out;
  out.reserve(64 + trace.rows.size() / k * 160);
  out += kTraceHeader;
  out += '\n';
  for (std::size_t i = 0; i < trace.rows.size(); i += k) {
    const auto& r = trace.rows[i];
    out += format_number(r.t);
    out += ',';
    out += tag_name(r.mode);
    for (double v : {r.motor_angle, r.motor_velocity, r.output_angle, r.output_velocity, r.tau_cmd,
                     r.tau_applied, r.tau_spring, r.current}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::size_t write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                            std::optional<double> decimate_to_hz) {
  const std::string text = format_trace_csv(trace, decimate_to_hz);
  write_text_file(path, text);
  const std::size_t k = decimation_factor(trace, decimate_to_hz);
  return (trace.rows.size() + k - 1) / k;
}

Trace parse_trace_csv(std::string_view text) {
  Trace trace;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const auto end = text.find('\n', pos);
    line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return true;
  };
  std::string_view line;
  if (!next_line(line) || line != kTraceHeader) throw IoError("trace csv: missing or bad header");
  while (next_line(line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 10) throw IoError("trace csv: expected 10 columns");
    TraceRow r;
    r.t = parse_double(fields[0]);
    r.mode = parse_tag(fields[1]);
    r.motor_angle = parse_double(fields[2]);
    r.motor_velocity = parse_double(fields[3]);
    r.output_angle = parse_double(fields[4]);
    r.output_velocity = parse_double(fields[5]);
    r.tau_cmd = parse_double(fields[6]);
    r.tau_applied = parse_double(fields[7]);
    r.tau_spring = parse_double(fields[8]);
    r.current = parse_double(fields[9]);
    trace.rows.push_back(r);
  }
  if (trace.rows.size() >= 2) trace.sample_period = trace.rows[1].t - trace.rows[0].t;
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Trace apply_noise(const Trace& trace, const NoiseModel& model) {
  if (!model.enabled) return trace;
  Trace out = trace;
  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& r : out.rows) {
    double deg = rad_to_deg(r.output_angle);
    if (model.quantization_deg > 0.0) {
      deg = std::round(deg / model.quantization_deg) * model.quantization_deg;
    }
    if (model.sigma_deg > 0.0) deg += model.sigma_deg * gauss(rng);
    r.output_angle = deg_to_rad(deg);
  }
  return out;
}

}  // namespace dtea
