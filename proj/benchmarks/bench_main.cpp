#include <benchmark/benchmark.h>

#include "plstab/experiments.hpp"
#include "plstab/midpoint.hpp"
#include "plstab/transport.hpp"

using namespace plstab;

static void BM_QuadraticCost(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto f = random_density(1, n);
  const auto g = random_density(2, n);
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_cost(f, g));
}
BENCHMARK(BM_QuadraticCost)->Arg(1)->Arg(3)->Arg(6);

static void BM_DeficitIntegral(benchmark::State& state) {
  const auto t = make_example(ExampleKind::Exa3, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(pl_deficit_integral(t.f, t.g));
}
BENCHMARK(BM_DeficitIntegral);

static void BM_SupConvolution(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto f = random_density(3, n);
  const auto g = random_density(4, n);
  for (auto _ : state) benchmark::DoNotOptimize(sup_convolution(f, g));
}
BENCHMARK(BM_SupConvolution)->Arg(1)->Arg(3)->Arg(6);

static void BM_L1Distance(benchmark::State& state) {
  const auto f = random_density(5, 6);
  const auto g = random_density(6, 6);
  for (auto _ : state) benchmark::DoNotOptimize(l1_distance(f, g));
}
BENCHMARK(BM_L1Distance);

static void BM_Align(benchmark::State& state) {
  const auto t = make_example(ExampleKind::Exa3, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(align(t.f, t.m));
}
BENCHMARK(BM_Align);
BENCHMARK_MAIN();
