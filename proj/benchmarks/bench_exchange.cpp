#include <benchmark/benchmark.h>

#include <cmath>

#include "cex/exchange.hpp"
#include "cex/gram.hpp"

using namespace cex;

namespace {

const SubsystemLayout kPair{{"P", 3}, {"Q", 3}};

PureState bell_qutrit() {
  Vector v = Vector::Zero(9);
  v(4) = v(8) = 1.0 / std::sqrt(2.0);
  return PureState(kPair, v);
}

PureState zero_pair() { return PureState::basis(kPair, {0, 0}); }

void BM_BuildResourceDense(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto phi = bell_qutrit();
  const auto psi = zero_pair();
  for (auto _ : state) benchmark::DoNotOptimize(build_resource(phi, psi, n));
}
BENCHMARK(BM_BuildResourceDense)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

void BM_ExchangeDense(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto phi = bell_qutrit();
  const auto r = build_resource(phi, zero_pair(), n);
  for (auto _ : state) benchmark::DoNotOptimize(exchange(phi, r));
}
BENCHMARK(BM_ExchangeDense)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_ExchangeGram(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto phi = bell_qutrit();
  const auto r = build_resource(phi, zero_pair(), n, Backend::gram);
  for (auto _ : state) benchmark::DoNotOptimize(exchange(phi, r));
}
BENCHMARK(BM_ExchangeGram)->RangeMultiplier(100)->Range(1, 1000000);

void BM_GramIntervalSum(benchmark::State& state) {
  const GramResource g(static_cast<std::uint64_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(g.residual_overlap(Direction::forward));
}
BENCHMARK(BM_GramIntervalSum)->RangeMultiplier(100)->Range(10, 1000000);

void BM_OverlapFormula(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(overlap_formula(n, 0.999));
}
BENCHMARK(BM_OverlapFormula)->RangeMultiplier(100)->Range(10, 1000000);

}  // namespace
