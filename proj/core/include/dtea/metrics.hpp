#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dtea {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Throws
/// std::invalid_argument with fewer than two distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

using Point = std::pair<double, double>;

/// Absolute shoelace area of a polyline, closed back to its first point.
/// Throws std::invalid_argument with fewer than three points.
double hysteresis_area(std::span<const Point> loop);

/// Root mean square. Throws std::invalid_argument on empty input.
double rms(std::span<const double> values);

/// Time (ms) from the first sample until `angles` stays within
/// reference +- band for good. Zero if never outside; nullopt if the last
/// sample is still outside.
std::optional<double> settling_time(std::span<const double> angles, double sample_period,
                                    double reference, double band);

/// Largest |angle - reference|, in degrees.
double peak_deflection(std::span<const double> angles, double reference);

/// Indices i where the sign of (x[i] - reference) differs from the previous
/// non-zero sign.
std::vector<std::size_t> zero_crossings(std::span<const double> values, double reference);

}  // namespace dtea
