#include <benchmark/benchmark.h>

#include "bsasim/experiments.hpp"

namespace {

void BM_CircuitEvolution(benchmark::State& state) {
  bsa::CircuitConfig cfg;
  cfg.spdc.order = static_cast<int>(state.range(0));
  const bsa::QuantumState src = bsa::bsa_source(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsa::evolve_circuit(cfg, src));
  }
}
BENCHMARK(BM_CircuitEvolution)->Arg(1)->Arg(2);

void BM_RunBsaExact(benchmark::State& state) {
  bsa::CircuitConfig cfg;
  cfg.spdc.order = static_cast<int>(state.range(0));
  const std::vector<bsa::InputKind> inputs{
      bsa::InputKind::PhiPlus, bsa::InputKind::PhiMinus,
      bsa::InputKind::PsiPlus, bsa::InputKind::PsiMinus};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsa::run_bsa(cfg, inputs, bsa::SampleSpec{}));
  }
}
BENCHMARK(BM_RunBsaExact)->Arg(1)->Arg(2);

void BM_SourceOrder2(benchmark::State& state) {
  bsa::SpdcSpec spec;
  spec.order = 2;
  spec.backward_overlap = 0.95;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsa::spdc_state(spec, 8));
  }
}
BENCHMARK(BM_SourceOrder2);

}  // namespace

BENCHMARK_MAIN();
