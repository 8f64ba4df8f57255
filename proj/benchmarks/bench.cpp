#include <benchmark/benchmark.h>

#include "dtea/experiments.hpp"

namespace {

using namespace dtea;

void hub_torque(benchmark::State& state) {
  const auto hub = HubModel::nonlinear(HubGeometry{});
  double beta = -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hub.torque(beta));
    beta = beta > 0.5 ? -0.5 : beta + 1e-4;
  }
}
BENCHMARK(hub_torque);

template <class S>
void plant_step(benchmark::State& state, S initial) {
  const auto preset = calibrated();
  const auto hub = dynamics_hub(preset);
  PlantState s = initial;
  SimClock clock;
  for (auto _ : state) {
    auto r = step(s, clock, p_position(0.2, motor_angle(s), 30.0), preset.params, hub, preset.load);
    s = r.state;
    clock = r.clock;
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(plant_step, sea, SeaState{});
BENCHMARK_CAPTURE(plant_step, pea, PeaState{});

void one_impact(benchmark::State& state) {
  DisturbanceConfig cfg;
  cfg.impacts = 1;
  const auto preset = calibrated();
  for (auto _ : state) benchmark::DoNotOptimize(run_disturbance(Mode::sea, preset, cfg).report);
}
BENCHMARK(one_impact)->Unit(benchmark::kMillisecond);

void stiffness_sweep(benchmark::State& state) {
  const auto preset = calibrated();
  for (auto _ : state) benchmark::DoNotOptimize(run_static_stiffness(Mode::sea, preset).report);
}
BENCHMARK(stiffness_sweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
