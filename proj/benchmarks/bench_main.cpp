#include <benchmark/benchmark.h>

#include "legnorm/coeffs.hpp"
#include "legnorm/exterior.hpp"
#include "legnorm/geometry.hpp"
#include "legnorm/harness.hpp"

using namespace legnorm;

static void BM_ParseExpression(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        parse_expression("exp(v1)*(v2^2 + sin(x1*v3)) / (1 + v1^2) - ln(2 + v2^2)"));
}
BENCHMARK(BM_ParseExpression);

static void BM_EvalJet(benchmark::State& state) {
  const BoundExpression e = bind(
      parse_expression("exp(v1)*(v2^2 + sin(x1*v3)) / (1 + v1^2) - ln(2 + v2^2)"), 3);
  const ChartPoint p{{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}};
  for (auto _ : state) benchmark::DoNotOptimize(e.eval_jet(p));
}
BENCHMARK(BM_EvalJet);

static void BM_EvaluateFrame(benchmark::State& state) {
  const MapDefinition m = builtin_exp_scaled_map();
  const ChartPoint p{{0, 0, 0}, {0.3, -1.2, 0.7}};
  for (auto _ : state) {
    FiberFrame f = evaluate_frame(m, p);
    benchmark::DoNotOptimize(residual_full(f));
  }
}
BENCHMARK(BM_EvaluateFrame);

static void BM_RunCheck(benchmark::State& state) {
  const MapDefinition m = builtin_exp_scaled_map();
  const auto pts = sample_points(3, RandomSampling{});
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_check(m, pts, {}, threads));
}
BENCHMARK(BM_RunCheck)->Arg(1)->Arg(4)->UseRealTime();

static void BM_CoeffTable(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(CoeffTable(k));
}
BENCHMARK(BM_CoeffTable)->Arg(12)->Arg(40)->Arg(200);

static void BM_MonomialCancellation(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const CoeffTable t(k + 1);
  for (auto _ : state) benchmark::DoNotOptimize(verify_monomial_cancellation(k, t));
}
BENCHMARK(BM_MonomialCancellation)->Arg(12)->Arg(30);

static void BM_DSquared(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const CoeffTable t(k + 3);
  for (auto _ : state) benchmark::DoNotOptimize(check_d_squared(k, k + 2, t));
}
BENCHMARK(BM_DSquared)->Arg(4)->Arg(12)->Arg(24);
BENCHMARK_MAIN();
