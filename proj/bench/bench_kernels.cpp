#include <benchmark/benchmark.h>

#include "qrg/coherent.hpp"
#include "qrg/game.hpp"
#include "qrg/montecarlo.hpp"
#include "qrg/rng.hpp"
#include "qrg/sdp.hpp"

using namespace qrg;

namespace {

void BM_SelectiveValue(benchmark::State& state, bool parallel) {
  const HiddenMatchingGame g = make_game(canonical_family(static_cast<int>(state.range(0))));
  const Ensemble e = hm_ensemble(g);
  const ConsistencyTable t = consistency_table(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? selective_value_numeric(e, t) : selective_value_numeric_serial(e, t));
  }
}

std::vector<RealMatrix> random_inverses(int d, int answers) {
  SplitMix64 rng(1);
  std::vector<RealMatrix> out;
  for (int a = 0; a < answers; ++a) {
    RealMatrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = rng.uniform() - 0.5;
    out.push_back(m * m.transpose() + RealMatrix::Identity(d, d));
  }
  return out;
}

void BM_SelectiveClosedForm(benchmark::State& state, bool parallel) {
  const HiddenMatchingGame g = make_game(canonical_family(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? selective_value(g) : selective_value_serial(g));
  }
}

void BM_BarrierHessian(benchmark::State& state, bool parallel) {
  const auto inv = random_inverses(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? detail::barrier_hessian(inv) : detail::barrier_hessian_serial(inv));
  }
}

void BM_MonteCarlo(benchmark::State& state, bool parallel) {
  const CoherentGameParams p = make_coherent_params(canonical_family(2), 1.0, 0.8, 0.9);
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? run_trials(p, 0, trials, 1) : run_trials_serial(p, 0, trials, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials));
}

}  // namespace

BENCHMARK_CAPTURE(BM_SelectiveValue, serial, false)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SelectiveValue, openmp, true)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SelectiveClosedForm, serial, false)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SelectiveClosedForm, openmp, true)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BarrierHessian, serial, false)->Args({16, 16})->Args({32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BarrierHessian, openmp, true)->Args({16, 16})->Args({32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, serial, false)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, openmp, true)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
