#include <benchmark/benchmark.h>

#include "afb/pipeline.hpp"
#include "afb/rng.hpp"

namespace {

void BM_LabelComponents(benchmark::State& state) {
  afb::BinaryMask mask(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  afb::SplitMix64 rng(7);
  for (auto& v : mask.data) v = rng.next_double() < 0.45 ? 1 : 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(afb::label_components(mask));
  }
  state.SetItemsProcessed(state.iterations() * mask.data.size());
}

void BM_GenerateScene(benchmark::State& state) {
  afb::GeneratorParams params;
  params.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(afb::generate_scene(params));
  }
}

void BM_DetectFov(benchmark::State& state) {
  const afb::PipelineConfig config;
  afb::GeneratorParams params = config.synth;
  params.seed = 13;
  const auto [img, scene] = afb::generate_scene(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(afb::detect_fov(img, "bench", config));
  }
}

}  // namespace

BENCHMARK(BM_LabelComponents)->Arg(256)->Arg(512);
BENCHMARK(BM_GenerateScene)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectFov)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
