#include <benchmark/benchmark.h>

#include "afb/rng.hpp"
#include "afb/threshold.hpp"

namespace {

afb::ScalarImage random_map(int side, std::uint64_t seed) {
  afb::ScalarImage map(side, side);
  afb::SplitMix64 rng(seed);
  for (auto& v : map.data) v = static_cast<double>(rng.uniform_int(0, 255));
  return map;
}

void BM_SauvolaIntegral(benchmark::State& state) {
  const auto map = random_map(static_cast<int>(state.range(0)), 1);
  afb::SauvolaParams params;
  params.window = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(afb::sauvola_threshold_map(map, params));
  }
  state.SetItemsProcessed(state.iterations() * map.data.size());
}

void BM_SauvolaInterpolated(benchmark::State& state) {
  const auto map = random_map(static_cast<int>(state.range(0)), 1);
  afb::SauvolaParams params;
  params.window = 15;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        afb::sauvola_threshold_map_interpolated(map, params, static_cast<int>(state.range(1))));
  }
  state.SetItemsProcessed(state.iterations() * map.data.size());
}

// The O(W^2 N^2) scan the integral image replaces, for scaling comparison.
void BM_SauvolaNaive(benchmark::State& state) {
  const auto map = random_map(static_cast<int>(state.range(0)), 1);
  afb::SauvolaParams params;
  params.window = static_cast<int>(state.range(1));
  const int radius = params.window / 2;
  for (auto _ : state) {
    afb::ScalarImage out(map.width, map.height);
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const int x0 = std::max(0, x - radius), x1 = std::min(map.width - 1, x + radius);
        const int y0 = std::max(0, y - radius), y1 = std::min(map.height - 1, y + radius);
        double sum = 0.0, sq = 0.0;
        int n = 0;
        for (int yy = y0; yy <= y1; ++yy) {
          for (int xx = x0; xx <= x1; ++xx) {
            const double v = map.at(xx, yy);
            sum += v;
            sq += v * v;
            ++n;
          }
        }
        const double m = sum / n;
        const double s = std::sqrt(std::max(0.0, sq / n - m * m));
        out.at(x, y) = m * (1.0 + params.k * (s / params.r_cap - 1.0));
      }
    }
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * map.data.size());
}

void BM_IterativeThreshold(benchmark::State& state) {
  const auto map = random_map(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(afb::iterative_global_threshold(map));
  }
}

}  // namespace

BENCHMARK(BM_SauvolaIntegral)->Args({256, 15})->Args({256, 31})->Args({512, 15});
BENCHMARK(BM_SauvolaInterpolated)->Args({256, 4})->Args({512, 4})->Args({512, 8});
BENCHMARK(BM_SauvolaNaive)->Args({256, 15})->Args({256, 31})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IterativeThreshold)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
