#include <benchmark/benchmark.h>

#include "multiwell/fluctuation.hpp"
#include "multiwell/instanton.hpp"
#include "multiwell/oracle.hpp"
#include "multiwell/twolevel.hpp"

using namespace multiwell;

namespace {

struct Fixture {
  PotentialModel model;
  std::vector<Well> wells;
  std::vector<WellPair> pairs;
};

const Fixture& double_well() {
  static const Fixture f = [] {
    PotentialModel m = level_potential(symmetric_double_well(0.2, std::sqrt(15.0)));
    auto w = find_wells(m);
    return Fixture{m, w, adjacent_pairs(m, w)};
  }();
  return f;
}

const Fixture& triple() {
  static const Fixture f = [] {
    PotentialModel m = level_potential(triple_well(1.0, 1.0));
    auto w = find_wells(m);
    return Fixture{m, w, adjacent_pairs(m, w)};
  }();
  return f;
}

void BM_FindWells(benchmark::State& state) {
  const PotentialModel raw = triple_well(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(find_wells(level_potential(raw)));
}
BENCHMARK(BM_FindWells);

void BM_SolveTrajectory(benchmark::State& state) {
  const Fixture& f = triple();
  for (auto _ : state) benchmark::DoNotOptimize(solve_trajectory(f.model, f.pairs[1]));
}
BENCHMARK(BM_SolveTrajectory)->Unit(benchmark::kMillisecond);

void BM_GelfandYaglom(benchmark::State& state) {
  const Fixture& f = triple();
  const InstantonSolution sol = solve_trajectory(f.model, f.pairs[1]);
  GYOptions opt;
  opt.window = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gelfand_yaglom(sol, opt));
}
BENCHMARK(BM_GelfandYaglom)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Schrodinger(benchmark::State& state) {
  const Fixture& f = double_well();
  const GridSpec grid = default_grid(f.wells, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_schrodinger(f.model, grid, 2));
}
BENCHMARK(BM_Schrodinger)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_FluctuationOracle(benchmark::State& state) {
  const Fixture& f = double_well();
  const InstantonSolution sol = solve_trajectory(f.model, f.pairs[0]);
  const FluctuationOperator op = FluctuationOperator::from_instanton(sol, 30.0);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_fluctuation(op));
}
BENCHMARK(BM_FluctuationOracle)->Unit(benchmark::kMillisecond);

void BM_Overlaps(benchmark::State& state) {
  const TwoLevelSystem s = two_level_energies(0.01, 0.02, 0.02, 1e-3, 2);
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(overlap_odd(s, tau) + overlap_even(s, tau));
    tau += 1e-3;
  }
}
BENCHMARK(BM_Overlaps);

}  // namespace

BENCHMARK_MAIN();
