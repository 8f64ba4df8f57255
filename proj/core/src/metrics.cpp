#include "dtea/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dtea/control.hpp"

namespace dtea {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("linear_fit: need at least two samples");

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x values have no spread");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.slope * x[i] + fit.intercept);
      sse += r * r;
    }
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

double hysteresis_area(std::span<const Point> loop) {
  if (loop.size() < 3) throw std::invalid_argument("hysteresis_area: need at least 3 points");
  double twice = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& a = loop[i];
    const Point& b = loop[(i + 1) % loop.size()];
    twice += a.first * b.second - b.first * a.second;
  }
  return std::abs(0.5 * twice);
}

double rms(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("rms: empty series");
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

std::optional<double> settling_time(std::span<const double> angles, double sample_period,
                                    double reference, double band) {
  std::optional<std::size_t> last_outside;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (std::abs(angles[i] - reference) > band) last_outside = i;
  }
  if (!last_outside) return 0.0;
  if (*last_outside + 1 >= angles.size()) return std::nullopt;
  return static_cast<double>(*last_outside + 1) * sample_period * 1000.0;
}

double peak_deflection(std::span<const double> angles, double reference) {
  double peak = 0.0;
  for (double a : angles) peak = std::max(peak, std::abs(a - reference));
  return rad_to_deg(peak);
}

std::vector<std::size_t> zero_crossings(std::span<const double> values, double reference) {
  std::vector<std::size_t> out;
  int sign = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - reference;
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) out.push_back(i);
    sign = s;
  }
  return out;
}

}  // namespace dtea
