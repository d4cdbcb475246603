#include <benchmark/benchmark.h>

#include "dynmed/dag_learn.hpp"
#include "dynmed/effects_finite.hpp"
#include "dynmed/effects_infinite.hpp"
#include "dynmed/oracle.hpp"
#include "dynmed/simulator.hpp"

namespace {

using namespace dynmed;

Panel finite_panel(int n, int T, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.T = T;
  cfg.d = 3;
  cfg.params = finite_setting(T, 2024);
  cfg.seed = seed;
  return simulate(cfg);
}

void BM_Simulate(benchmark::State& state) {
  SimConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.T = 10;
  cfg.d = 3;
  cfg.params = finite_setting(10, 2024);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(cfg));
    ++cfg.seed;
  }
  state.SetItemsProcessed(state.iterations() * cfg.n * cfg.T);
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000);

void BM_LearnDag(benchmark::State& state) {
  const Panel p = finite_panel(static_cast<int>(state.range(0)), 2, 3);
  const Eigen::MatrixXd res = residualize(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(learn_dag(res, {}));
}
BENCHMARK(BM_LearnDag)->Arg(500);

void BM_EstimateFinite(benchmark::State& state) {
  const Panel p = finite_panel(static_cast<int>(state.range(0)), 10, 5);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_finite(p));
}
BENCHMARK(BM_EstimateFinite)->Arg(100)->Arg(500);

void BM_EstimateInfinite(benchmark::State& state) {
  SimConfig cfg;
  cfg.n = 100;
  cfg.T = static_cast<int>(state.range(0));
  cfg.d = 3;
  cfg.params = {stationary_setting(2024)};
  cfg.burn_in = 5;
  const Panel p = simulate(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_infinite(p));
}
BENCHMARK(BM_EstimateInfinite)->Arg(100);

void BM_TruthFinite(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const auto params = finite_setting(T, 2024);
  for (auto _ : state) benchmark::DoNotOptimize(true_report_finite(params, T));
}
BENCHMARK(BM_TruthFinite)->Arg(10)->Arg(50);

void BM_StationaryRecursion(benchmark::State& state) {
  const SemParams p = stationary_setting(2024);
  const WithinStage w = analytic_within_stage(p);
  for (auto _ : state)
    benchmark::DoNotOptimize(finite_eta_stationary(p, w, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_StationaryRecursion)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
