// Fits damping, Coulomb friction and the impact pulse so the simulated
// hysteresis and impact response land on the measured values.
//
// Coulomb levels are solved per mode from the loop areas, the pulse from the
// SEA peak, and the two viscous terms by a refined grid over the remaining
// targets (PEA peak and both settling times).

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "dtea/experiments.hpp"
#include "dtea/io.hpp"

namespace {

using namespace dtea;

struct Targets {
  double sea_area = 0.073;
  double pea_area = 0.024;
  double sea_peak = 5.2;
  double pea_peak = 2.3;
  double sea_settle = 1380.0;
  double pea_settle = 400.0;
};

struct Candidate {
  Preset preset;
  double pulse = 1.0;
  double sea_area = 0.0;
  double pea_area = 0.0;
  double sea_peak = 0.0;
  double pea_peak = 0.0;
  double sea_settle = 0.0;
  double pea_settle = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

double loop_area(Mode mode, const Preset& preset) {
  return run_static_stiffness(mode, preset).report.loop_area;
}

// Area grows almost affinely with the Coulomb level; a few secant steps suffice.
double solve_coulomb(Mode mode, Preset preset, double target) {
  double& c = mode == Mode::sea ? preset.params.coulomb_sea : preset.params.coulomb_pea;
  double x0 = 0.0;
  c = x0;
  double f0 = loop_area(mode, preset) - target;
  double x1 = 0.05;
  for (int i = 0; i < 6; ++i) {
    c = x1;
    const double f1 = loop_area(mode, preset) - target;
    if (std::abs(f1) < 1e-6 || f1 == f0) break;
    const double next = std::max(0.0, x1 - f1 * (x1 - x0) / (f1 - f0));
    x0 = x1;
    f0 = f1;
    x1 = next;
  }
  return x1;
}

std::optional<DisturbanceReport> impact(Mode mode, const Preset& preset, double pulse) {
  DisturbanceConfig cfg;
  cfg.pulse_torque = pulse;
  try {
    return run_disturbance(mode, preset, cfg).report;
  } catch (const SimulationError&) {
    return std::nullopt;
  }
}

double log_error(double value, double target) {
  const double e = std::log(value / target);
  return e * e;
}

Candidate evaluate(const Preset& base, double motor_damping, double output_damping,
                   const Targets& t) {
  Candidate c;
  c.preset = base;
  c.preset.params.motor_damping = motor_damping;
  c.preset.params.output_damping = output_damping;
  c.preset.params.coulomb_sea = solve_coulomb(Mode::sea, c.preset, t.sea_area);
  c.preset.params.coulomb_pea = solve_coulomb(Mode::pea, c.preset, t.pea_area);

  // Peak deflection is close to linear in the pulse.
  double pulse = 5.0;
  std::optional<DisturbanceReport> sea;
  for (int i = 0; i < 4; ++i) {
    sea = impact(Mode::sea, c.preset, pulse);
    if (!sea || sea->mean_peak_deg <= 0.0) return c;
    pulse *= t.sea_peak / sea->mean_peak_deg;
  }
  sea = impact(Mode::sea, c.preset, pulse);
  const auto pea = impact(Mode::pea, c.preset, pulse);
  if (!sea || !pea || !sea->mean_settling_ms || !pea->mean_settling_ms) return c;

  c.pulse = pulse;
  c.sea_area = loop_area(Mode::sea, c.preset);
  c.pea_area = loop_area(Mode::pea, c.preset);
  c.sea_peak = sea->mean_peak_deg;
  c.pea_peak = pea->mean_peak_deg;
  c.sea_settle = *sea->mean_settling_ms;
  c.pea_settle = *pea->mean_settling_ms;
  c.cost = log_error(c.pea_peak, t.pea_peak) + log_error(c.sea_settle, t.sea_settle) +
           log_error(c.pea_settle, t.pea_settle) + log_error(c.sea_peak, t.sea_peak);
  return c;
}

void print(std::ostream& os, const Candidate& c) {
  const auto& p = c.preset.params;
  os << std::fixed << std::setprecision(4) << "b_m=" << p.motor_damping
     << " b_o=" << p.output_damping << " c_sea=" << p.coulomb_sea << " c_pea=" << p.coulomb_pea
     << " pulse=" << c.pulse << " | area " << c.sea_area << "/" << c.pea_area << " peak "
     << std::setprecision(3) << c.sea_peak << "/" << c.pea_peak << " settle "
     << std::setprecision(1) << c.sea_settle << "/" << c.pea_settle << " cost "
     << std::setprecision(5) << c.cost << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit the calibrated preset", "dtea-calibrate"};
  std::string base_name = "paper-full-range";
  std::string out_path;
  int grid = 6;
  int levels = 3;
  double round_to = 0.005;
  app.add_option("--base", base_name, "Preset supplying geometry and inertias")->capture_default_str();
  app.add_option("--out", out_path, "Write the fitted preset JSON here");
  app.add_option("--grid", grid, "Grid points per axis")->check(CLI::Range(2, 50))->capture_default_str();
  app.add_option("--levels", levels, "Grid refinement levels")->check(CLI::Range(1, 10))->capture_default_str();
  app.add_option("--round", round_to, "Round fitted values to this step (0 keeps full precision)")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    Preset base = resolve_preset(base_name);
    base.name = "calibrated";
    const Targets targets;

    double bm_lo = 0.05;
    double bm_hi = 0.60;
    double bo_lo = 0.02;
    double bo_hi = 0.50;
    Candidate best;
    for (int level = 0; level < levels; ++level) {
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
          const double bm = bm_lo + (bm_hi - bm_lo) * i / (grid - 1);
          const double bo = bo_lo + (bo_hi - bo_lo) * j / (grid - 1);
          auto c = evaluate(base, bm, bo, targets);
          if (c.cost < best.cost) best = std::move(c);
        }
      }
      std::cout << "level " << level << ": ";
      print(std::cout, best);
      const double hm = (bm_hi - bm_lo) / (grid - 1);
      const double ho = (bo_hi - bo_lo) / (grid - 1);
      const auto& p = best.preset.params;
      bm_lo = std::max(0.0, p.motor_damping - hm);
      bm_hi = p.motor_damping + hm;
      bo_lo = std::max(0.0, p.output_damping - ho);
      bo_hi = p.output_damping + ho;
    }
    if (!std::isfinite(best.cost)) {
      std::cerr << "no candidate produced a settled response\n";
      return 2;
    }

    if (round_to > 0.0) {
      auto snap = [&](double v) { return std::round(v / round_to) * round_to; };
      auto p = best.preset.params;
      const double bm = snap(p.motor_damping);
      const double bo = snap(p.output_damping);
      best = evaluate(base, bm, bo, targets);
      best.preset.params.coulomb_sea = snap(best.preset.params.coulomb_sea);
      best.preset.params.coulomb_pea = snap(best.preset.params.coulomb_pea);
      best.pulse = std::round(best.pulse * 100.0) / 100.0;
      const auto sea = impact(Mode::sea, best.preset, best.pulse);
      const auto pea = impact(Mode::pea, best.preset, best.pulse);
      best.sea_area = loop_area(Mode::sea, best.preset);
      best.pea_area = loop_area(Mode::pea, best.preset);
      if (sea && pea) {
        best.sea_peak = sea->mean_peak_deg;
        best.pea_peak = pea->mean_peak_deg;
        best.sea_settle = sea->mean_settling_ms.value_or(0.0);
        best.pea_settle = pea->mean_settling_ms.value_or(0.0);
      }
      std::cout << "rounded: ";
      print(std::cout, best);
    }
    if (!out_path.empty()) save_preset(best.preset, out_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
