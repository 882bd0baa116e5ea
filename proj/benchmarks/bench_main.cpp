#include <benchmark/benchmark.h>

#include "condest/condest.hpp"

using namespace condest;

namespace {

Config desk(double c, double eps) { return make_config(desk_profile(), c, eps); }

void BM_TargetTest(benchmark::State& state) {
  auto d = gen_named(parse_family("zipf:1"), 256, 0);
  OracleSession s(d, 1);
  const auto cfg = desk(0.05, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(target_test(s, 3, 4, cfg.target));
}
BENCHMARK(BM_TargetTest);

void BM_FilterDraw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto d = gen_named(parse_family("uniform"), n, 0);
  OracleSession s(d, 2);
  const double alpha = 1.0 / static_cast<double>(state.range(1));
  for (auto _ : state) {
    FilterUnion f{s.fresh_seed(), alpha, 1, {}};
    benchmark::DoNotOptimize(s.sample_conditional(f));
  }
}
BENCHMARK(BM_FilterDraw)->Args({1024, 2})->Args({1024, 256})->Args({1 << 16, 4096});

void BM_ExpectedBeta(benchmark::State& state) {
  auto d = gen_named(parse_family("uniform"), static_cast<std::size_t>(state.range(0)), 0);
  OracleSession s(d, 3);
  const auto cfg = desk(0.05, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(est_expected_beta(s, cfg, 1, 0.25));
}
BENCHMARK(BM_ExpectedBeta)->Arg(64)->Arg(256);

void BM_StrictSearch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t target = n / 3 + 1;
  auto cmp = [&](std::size_t i) {
    return i < target ? Verdict::Low : (i == target ? Verdict::Good : Verdict::High);
  };
  for (auto _ : state) benchmark::DoNotOptimize(strict_binary_search(n, cmp));
}
BENCHMARK(BM_StrictSearch)->Arg(64)->Arg(1 << 12)->Arg(1 << 20);

void BM_EstimateSingle(benchmark::State& state) {
  auto d = gen_named(parse_family("uniform"), static_cast<std::size_t>(state.range(0)), 0);
  const auto cfg = desk(0.05, 0.2);
  std::uint64_t seed = 10;
  for (auto _ : state) {
    OracleSession s(d, seed++);
    benchmark::DoNotOptimize(estimate_single(s, cfg, 1).estimate);
  }
}
BENCHMARK(BM_EstimateSingle)->Arg(64)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
