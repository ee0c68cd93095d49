#include <benchmark/benchmark.h>

#include "cex/game.hpp"
#include "cex/optimizer.hpp"

using namespace cex;

namespace {

void BM_PlayPrescribedDense(benchmark::State& state) {
  const auto s = prescribed_strategy(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(play(s));
}
BENCHMARK(BM_PlayPrescribedDense)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_PlayRandom(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto s = random_strategy(d, 3 * d, 7);
  for (auto _ : state) benchmark::DoNotOptimize(play(s));
}
BENCHMARK(BM_PlayRandom)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_ImprovePlayer(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto s = random_strategy(d, 3 * d, 7);
  for (auto _ : state) benchmark::DoNotOptimize(improve_player(s, Player::alice));
}
BENCHMARK(BM_ImprovePlayer)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_Seesaw(benchmark::State& state) {
  SeesawConfig cfg;
  cfg.d = static_cast<std::size_t>(state.range(0));
  cfg.restarts = 4;
  cfg.max_iters = 100;
  for (auto _ : state) benchmark::DoNotOptimize(seesaw(cfg));
}
BENCHMARK(BM_Seesaw)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace
