#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mdpabs/blackbox.hpp"
#include "mdpabs/estimator.hpp"
#include "mdpabs/grid.hpp"
#include "mdpabs/lp.hpp"
#include "mdpabs/scenario.hpp"
#include "mdpabs/synth.hpp"

using namespace mdpabs;

namespace {

void BM_NormalDraw(benchmark::State& state) {
  NoiseStream s(1);
  double acc = 0.0;
  for (auto _ : state) {
    acc += s.normal();
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NormalDraw);

void BM_JetStep(benchmark::State& state) {
  const BlackBoxSystem jet = jet_engine_system(0.01, 0.01);
  NoiseStream s(2);
  std::vector<double> x{0.1, -0.2};
  std::vector<double> out(2);
  for (auto _ : state) {
    jet.step_into(x, 7, s, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_JetStep);

void BM_Project(benchmark::State& state) {
  const Grid grid(StateBox({-0.5, -0.5}, {0.5, 0.5}), {20, 20});
  NoiseStream s(3);
  const auto points = sample_states(grid.box(), 4096, s);
  std::size_t i = 0;
  std::size_t acc = 0;
  for (auto _ : state) {
    acc += project(grid, points[i]).cell;
    i = (i + 1) & 4095;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Project);

void BM_AssembleProgram(benchmark::State& state) {
  const BlackBoxSystem jet = jet_engine_system(0.01, 0.01, {-0.5, 0.0, 0.5});
  const Grid grid(jet.state_box(), {6, 6});
  const SbfBasis basis = SbfBasis::per_coordinate(2, true);
  const std::size_t samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const ScenarioProgram p =
        assemble_program(jet, grid, basis, samples, 32, 0.005, NoiseStream(4), 1);
    benchmark::DoNotOptimize(p.coeffs.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(2 * samples * 36 * 3));
}
BENCHMARK(BM_AssembleProgram)->Arg(16)->Arg(64)->Arg(256);

void BM_LpSolveManyRows(benchmark::State& state) {
  // Scenario-shaped program: few variables, many rows, every row bounded by
  // the objective variable.
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LinearProgram lp;
  lp.var_count = 6;
  lp.objective.assign(6, 0.0);
  lp.objective[5] = 1.0;
  lp.lower.assign(6, -1e6);
  lp.upper.assign(6, 1e6);
  lp.lower[0] = 1e-6;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row(6);
    for (int j = 0; j < 5; ++j) row[static_cast<std::size_t>(j)] = u(rng);
    row[5] = -1.0;
    lp.add_row(row, u(rng));
  }
  for (auto _ : state) {
    const LpSolution s = solve(lp, 1e-9, 1);
    benchmark::DoNotOptimize(s.value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_LpSolveManyRows)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_RobustSweep(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const Grid grid(StateBox({0.0}, {1.0}), {cells});
  Sampler sampler = [](std::span<const double>, std::span<const double>, NoiseStream& noise,
                       std::span<double> out) { out[0] = noise.uniform(); };
  const BlackBoxSystem sys(StateBox({0.0}, {1.0}), InputSet::scalar({0.0, 1.0}),
                           std::move(sampler));
  const IntervalMdp imdp = estimate_imdp(sys, grid, 0.1, 0.1, NoiseStream(5), 1);
  const SafetySpec spec{StateBox({0.0}, {1.0}), 8, 0.0};
  for (auto _ : state) {
    const SynthesisResult r = robust_safety_value_iteration(imdp, spec, 1);
    benchmark::DoNotOptimize(r.values.values.data());
  }
}
BENCHMARK(BM_RobustSweep)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
