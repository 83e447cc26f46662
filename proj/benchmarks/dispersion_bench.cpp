#include <benchmark/benchmark.h>

#include <random>

#include "fsdim/dispersion.hpp"

namespace {

using namespace fsdim;

void BM_DeltaExact(benchmark::State& state) {
  std::mt19937_64 rng(17);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::pair<ProbabilityVector, ProbabilityVector>> pairs;
  for (int i = 0; i < 16; ++i) {
    pairs.emplace_back(random_distribution(rng, n), random_distribution(rng, n));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [pi, mu] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(delta_exact(pi, mu));
  }
}
BENCHMARK(BM_DeltaExact)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_SchurChain(benchmark::State& state) {
  std::mt19937_64 rng(23);
  const auto pi = random_distribution(rng, 6);
  const auto mu = random_distribution(rng, 6);
  const auto m = delta_exact(pi, mu).m_star;
  for (auto _ : state) benchmark::DoNotOptimize(check_schur_chain(pi, mu, m));
}
BENCHMARK(BM_SchurChain);

}  // namespace

BENCHMARK_MAIN();
