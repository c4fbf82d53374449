#include <cmath>

#include <benchmark/benchmark.h>

#include "dthsem/dthsem.hpp"

using namespace dth;

namespace {

StepOptions pendulum_options() {
  StepOptions o;
  o.constants =
      derive_constants(with_safety_factor(estimate_bounds(*pendulum(), Vector::Zero(4), 2.0, 33), 1.1), 0.5);
  return o;
}

Vector start(const StepOptions& o) {
  const Vector q = Vector::Constant(1, 1.0), p = Vector::Constant(1, 0.5);
  return ExtendedState::from_parts(q, 0.0, p, choose_conjugate_momentum(*pendulum(), q, 0.0, p, 0.1, o))
      .coords();
}

void BM_SolveMidpoint(benchmark::State& state) {
  const auto m = pendulum();
  Vector z(4);
  z << 1.0, 0.0, 0.5, 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_midpoint(*m, 0.1, z));
}
BENCHMARK(BM_SolveMidpoint);

void BM_ConstraintEval(benchmark::State& state) {
  const auto m = pendulum();
  Vector z(4);
  z << 1.0, 0.0, 0.5, 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(g_eval(*m, 0.1, z));
}
BENCHMARK(BM_ConstraintEval);

void BM_Step(benchmark::State& state) {
  const StepOptions o = pendulum_options();
  const Vector z = start(o);
  for (auto _ : state) benchmark::DoNotOptimize(step(*pendulum(), z, Direction::forward, o));
}
BENCHMARK(BM_Step);

void BM_Propagate(benchmark::State& state) {
  const StepOptions o = pendulum_options();
  const Vector z = start(o);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(*pendulum(), z, n, o));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Propagate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EstimateBounds(benchmark::State& state) {
  const auto m = pendulum();
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_bounds(*m, Vector::Zero(4), 2.0, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_EstimateBounds)->Arg(17)->Arg(33);

}  // namespace
BENCHMARK_MAIN();
