#include <benchmark/benchmark.h>

#include <cstdint>
#include <numeric>
#include <vector>

#include "hsumma/broadcast.hpp"
#include "hsumma/cost_model.hpp"
#include "hsumma/grid.hpp"
#include "hsumma/matrix.hpp"
#include "hsumma/simulator.hpp"

using namespace hsumma;

namespace {

std::vector<int> iota_ranks(int q) {
  std::vector<int> r(q);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

void BM_schedule_build(benchmark::State& state, BroadcastAlg alg) {
  const int q = static_cast<int>(state.range(0));
  const std::vector<int> parts = iota_ranks(q);
  for (auto _ : state) {
    BroadcastSchedule s = make_schedule(alg, 0, parts, 1 << 20);
    benchmark::DoNotOptimize(s.events.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_schedule_replay(benchmark::State& state, BroadcastAlg alg) {
  const int q = static_cast<int>(state.range(0));
  const BroadcastSchedule s = make_schedule(alg, 0, iota_ranks(q), 1 << 20);
  const HockneyParams hp{3e-6, 1e-9, 0.0};
  for (auto _ : state) {
    ClockState clocks = simulate_schedule(s, hp, ClockState(q));
    benchmark::DoNotOptimize(clocks.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.events.size()));
}

struct RunSetup {
  DistMatrix a, b;
  SimConfig cfg;
};

RunSetup make_run(int n, int side, int gside, int b, int B, BroadcastAlg alg) {
  RunSetup setup;
  const GridSpec grid = make_grid(side, side);
  const BlockLayout lay = make_block_layout(n, b, grid);
  Matrix ga(n, n), gb(n, n);
  fill_uniform(ga, 11);
  fill_uniform(gb, 12);
  setup.a = scatter_matrix(ga, lay);
  setup.b = scatter_matrix(gb, lay);
  setup.cfg.n = n;
  setup.cfg.grid = make_grouped_grid(grid, gside, gside);
  setup.cfg.block_inner = b;
  setup.cfg.block_outer = B;
  setup.cfg.alg = alg;
  setup.cfg.params = {1e-4, 1e-9, 0.0};
  setup.cfg.record_events = false;
  return setup;
}

void BM_run_summa(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RunSetup setup = make_run(n, 4, 1, n / 16, n / 16, BroadcastAlg::van_de_geijn);
  for (auto _ : state) {
    auto result = run_summa(setup.a, setup.b, setup.cfg);
    benchmark::DoNotOptimize(result.second.makespan_s);
  }
  // Multiply-add pairs performed per run.
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * n);
}

void BM_run_hsumma(benchmark::State& state) {
  const int gside = static_cast<int>(state.range(0));
  const int n = 128;
  const RunSetup setup = make_run(n, 8, gside, 4, 8, BroadcastAlg::van_de_geijn);
  for (auto _ : state) {
    auto result = run_hsumma(setup.a, setup.b, setup.cfg);
    benchmark::DoNotOptimize(result.second.makespan_s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * n);
}

void BM_cost_curve(benchmark::State& state) {
  const ModelProblem prob = make_model_problem(1 << 22, 1 << 20, 256, 256);
  const HockneyParams hp{5e-7, 1e-11, 2e-18};
  const BcastCostModel model = bcast_cost_model(BroadcastAlg::van_de_geijn);
  for (auto _ : state) {
    double acc = 0.0;
    for (double g = 1.0; g <= static_cast<double>(prob.p); g *= 2.0)
      acc += predict_execution(prob, hp, model, g);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 21);
}

}  // namespace

BENCHMARK_CAPTURE(BM_schedule_build, binomial, BroadcastAlg::binomial)->Arg(16)->Arg(256);
BENCHMARK_CAPTURE(BM_schedule_build, van_de_geijn, BroadcastAlg::van_de_geijn)
    ->Arg(16)
    ->Arg(256);
BENCHMARK_CAPTURE(BM_schedule_replay, binomial, BroadcastAlg::binomial)->Arg(16)->Arg(256);
BENCHMARK_CAPTURE(BM_schedule_replay, van_de_geijn, BroadcastAlg::van_de_geijn)
    ->Arg(16)
    ->Arg(256);
BENCHMARK(BM_run_summa)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_run_hsumma)->Arg(1)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(BM_cost_curve);

BENCHMARK_MAIN();
