// Serial reference vs OpenMP kernels on the heat model. Arg 0 is serial,
// arg 1 parallel.

#include <memory>

#include <benchmark/benchmark.h>

#include "rplace/devices.hpp"
#include "rplace/model.hpp"
#include "rplace/optimize.hpp"
#include "rplace/sweep.hpp"

using namespace rplace;

namespace {

Problem2Config heat() {
  const auto m = heat1d(16, 0.05, 1.0);
  Problem2Config c;
  c.A = m.A;
  c.Q = Matrix::Identity(16, 16);
  c.W = weight_preset("rank1:4", 16, "W");
  c.family = std::make_shared<GaussianActuators>(m.grid, 0.1, 1.0, 1);
  c.beta = 1000.0;
  c.gamma = 2.2;
  c.domain = Box{Vector::Constant(1, m.grid(0)), Vector::Constant(1, m.grid(15))};
  prepare(c);
  return c;
}

Execution mode(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

const LedgerInputs& inputs() {
  static const auto c = heat();
  static const LedgerInputs in{c.A, c.Q, c.W, c.beta, c.gamma};
  return in;
}

void BM_Ledger(benchmark::State& s) {
  const auto c = heat();
  for (auto _ : s) {
    benchmark::DoNotOptimize(estimate_constants(*c.family, *c.domain, 100, 7, inputs(), mode(s)));
  }
}

void BM_Multistart(benchmark::State& s) {
  const auto c = heat();
  const auto starts = random_starts(*c.domain, 8, 11);
  for (auto _ : s) benchmark::DoNotOptimize(multistart_p2(c, starts, 1e-6, mode(s)));
}

void BM_GridSearch(benchmark::State& s) {
  const auto c = heat();
  for (auto _ : s) benchmark::DoNotOptimize(grid_search_p2(c, *c.domain, 1000, mode(s)));
}

void BM_Lipschitz(benchmark::State& s) {
  const auto c = heat();
  static const auto L = estimate_constants(*c.family, *c.domain, 100, 7, inputs());
  for (auto _ : s) benchmark::DoNotOptimize(check_lipschitz_lemmas(c, L, *c.domain, 50, 5, mode(s)));
}

}  // namespace

BENCHMARK(BM_Ledger)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Multistart)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Lipschitz)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
