#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "afb/rng.hpp"
#include "afb/threshold.hpp"
#include "oracles.hpp"

using namespace afb;

namespace {

ScalarImage random_map(int w, int h, std::uint64_t seed) {
  ScalarImage map(w, h);
  SplitMix64 rng(seed);
  for (auto& v : map.data) v = static_cast<double>(rng.uniform_int(0, 255));
  return map;
}

BinaryMask random_mask(int w, int h, std::uint64_t seed, double fill = 0.5) {
  BinaryMask mask(w, h);
  SplitMix64 rng(seed);
  for (auto& v : mask.data) v = rng.next_double() < fill ? 1 : 0;
  return mask;
}

}  // namespace

TEST_CASE("redness_map applies clamp(R - (G+B)/2)") {
  RgbImage img(3, 1);
  std::uint8_t* p0 = img.at(0, 0);
  p0[0] = 255;  // pure red
  std::uint8_t* p1 = img.at(1, 0);
  p1[2] = 255;  // pure blue
  std::uint8_t* p2 = img.at(2, 0);
  p2[0] = 200;
  p2[1] = 100;
  p2[2] = 50;
  const ScalarImage map = redness_map(img);
  CHECK(map.at(0, 0) == 255.0);
  CHECK(map.at(1, 0) == 0.0);
  CHECK(map.at(2, 0) == 125.0);
}

TEST_CASE("iterative threshold settles between symmetric bimodal classes") {
  ScalarImage map(10, 10);
  for (std::size_t i = 0; i < 50; ++i) map.data[i] = 0.0;
  for (std::size_t i = 50; i < 100; ++i) map.data[i] = 200.0;
  const auto [t, mask] = iterative_global_threshold(map);
  CHECK(t == doctest::Approx(100.0));
  CHECK(mask.popcount() == 50);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(bool(mask.data[i]) == (map.data[i] == 200.0));
  }
}

TEST_CASE("iterative threshold on a constant map yields T = v and empty foreground") {
  const ScalarImage map(6, 4, 42.0);
  const auto [t, mask] = iterative_global_threshold(map);
  CHECK(t == 42.0);
  CHECK(mask.popcount() == 0);
}

TEST_CASE("iterative threshold matches the naive recurrence oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScalarImage map = random_map(4, 4, seed);
    const auto [t, mask] = iterative_global_threshold(map);
    const double expected = oracle::naive_iterative_threshold(map, {});
    CHECK(t == doctest::Approx(expected).epsilon(1e-12));
    for (std::size_t i = 0; i < map.data.size(); ++i) {
      CHECK(bool(mask.data[i]) == (map.data[i] > expected));
    }
  }
}

TEST_CASE("iterative threshold terminates within the iteration cap") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const ScalarImage map = random_map(8, 8, seed);
    CHECK_NOTHROW(iterative_global_threshold(map, {0.001, 100}));
  }
}

TEST_CASE("Sauvola on a uniform map: s = 0 gives t = m(1-k) exactly") {
  const ScalarImage map(9, 9, 100.0);
  SauvolaParams params;
  params.window = 3;
  params.k = 0.2;
  const ScalarImage t = sauvola_threshold_map(map, params);
  const double expected = 100.0 * (1.0 - 0.2);
  for (const double v : t.data) CHECK(v == expected);
}

TEST_CASE("Sauvola with s = R gives t = m exactly") {
  // 2x2 map {0,0,255,255}: every border-clipped 3x3 window is the whole
  // image, so m = 127.5 and s = 127.5 exactly; r_cap = s forces t = m.
  ScalarImage map(2, 2);
  map.data = {0.0, 0.0, 255.0, 255.0};
  SauvolaParams params;
  params.window = 3;
  params.k = 0.34;
  params.r_cap = 127.5;
  const ScalarImage t = sauvola_threshold_map(map, params);
  for (const double v : t.data) CHECK(v == 127.5);
}

TEST_CASE("integral-image Sauvola equals the naive window oracle") {
  SauvolaParams params;
  for (const int window : {3, 7, 15, 31}) {
    params.window = window;
    const ScalarImage map = random_map(64, 64, 500 + window);
    const ScalarImage fast = sauvola_threshold_map(map, params);
    const ScalarImage naive = oracle::naive_sauvola(map, params);
    double max_err = 0.0;
    for (std::size_t i = 0; i < fast.data.size(); ++i) {
      max_err = std::max(max_err, std::fabs(fast.data[i] - naive.data[i]));
    }
    CHECK(max_err < 1e-6);
  }
}

TEST_CASE("Sauvola window larger than the image still works via clipping") {
  const ScalarImage map = random_map(5, 4, 77);
  SauvolaParams params;
  params.window = 15;
  const ScalarImage fast = sauvola_threshold_map(map, params);
  const ScalarImage naive = oracle::naive_sauvola(map, params);
  for (std::size_t i = 0; i < fast.data.size(); ++i) {
    CHECK(fast.data[i] == doctest::Approx(naive.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("interpolated Sauvola with stride 1 is bit-identical to the exact path") {
  const ScalarImage map = random_map(40, 33, 901);
  SauvolaParams params;
  params.window = 7;
  const ScalarImage exact = sauvola_threshold_map(map, params);
  const ScalarImage interp = sauvola_threshold_map_interpolated(map, params, 1);
  CHECK(interp == exact);
}

TEST_CASE("interpolated Sauvola is exact on a linear ramp for any stride") {
  ScalarImage map(48, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 48; ++x) map.at(x, y) = 3.0 * x + 2.0 * y;
  SauvolaParams params;
  params.window = 9;
  const ScalarImage exact = sauvola_threshold_map(map, params);
  for (const int stride : {2, 3, 5, 8, 17}) {
    const ScalarImage interp = sauvola_threshold_map_interpolated(map, params, stride);
    double max_err = 0.0;
    for (std::size_t i = 0; i < exact.data.size(); ++i) {
      max_err = std::max(max_err, std::fabs(interp.data[i] - exact.data[i]));
    }
    CHECK(max_err < 1e-6);
  }
}

TEST_CASE("interpolated Sauvola on a random image: deviation is reported, not bounded") {
  const ScalarImage map = random_map(64, 64, 1234);
  SauvolaParams params;
  const ScalarImage exact = sauvola_threshold_map(map, params);
  const ScalarImage interp = sauvola_threshold_map_interpolated(map, params, 4);
  double mad = 0.0;
  for (std::size_t i = 0; i < exact.data.size(); ++i) {
    mad += std::fabs(interp.data[i] - exact.data[i]);
  }
  mad /= static_cast<double>(exact.data.size());
  CHECK(mad >= 0.0);  // measurement only; no contract on magnitude
  MESSAGE("stride-4 mean absolute deviation from exact thresholds: ", mad);
}

TEST_CASE("binarize uses the strict > comparison") {
  ScalarImage g(2, 1), t(2, 1);
  g.data = {80.0, 81.0};
  t.data = {80.0, 80.0};
  const BinaryMask mask = binarize(g, t);
  CHECK_FALSE(mask.at(0, 0));
  CHECK(mask.at(1, 0));
}

TEST_CASE("binarize rejects mismatched dimensions") {
  CHECK_THROWS_AS(binarize(ScalarImage(2, 2), ScalarImage(3, 2)), DimensionMismatch);
}

TEST_CASE("binarize foreground is antitone in the thresholds") {
  const ScalarImage map = random_map(16, 16, 55);
  ScalarImage t1 = random_map(16, 16, 56);
  ScalarImage t2 = t1;
  SplitMix64 rng(57);
  for (auto& v : t2.data) v += rng.uniform(0.0, 20.0);  // raise thresholds
  const BinaryMask m1 = binarize(map, t1);
  const BinaryMask m2 = binarize(map, t2);
  CHECK(m2.popcount() <= m1.popcount());
  for (std::size_t i = 0; i < m1.data.size(); ++i) {
    if (m2.data[i]) CHECK(m1.data[i]);  // raising t never adds foreground
  }
}

TEST_CASE("merge_masks AND and OR behave pixelwise") {
  const BinaryMask all_true(4, 4, true);
  const BinaryMask all_false(4, 4, false);
  CHECK(merge_masks(all_true, all_false).popcount() == 0);
  CHECK(merge_masks(all_true, all_false, MaskMerge::Or).popcount() == 16);

  const BinaryMask m = random_mask(8, 8, 60);
  CHECK(merge_masks(m, m) == m);      // idempotent
  CHECK(merge_masks(m, m, MaskMerge::Or) == m);
}

TEST_CASE("merge_masks rejects mismatched dimensions") {
  CHECK_THROWS_AS(merge_masks(BinaryMask(2, 2), BinaryMask(2, 3)), DimensionMismatch);
}

TEST_CASE("merged foreground is a subset of both inputs") {
  for (std::uint64_t seed = 70; seed < 80; ++seed) {
    const BinaryMask a = random_mask(16, 16, seed);
    const BinaryMask b = random_mask(16, 16, seed + 1000);
    const BinaryMask out = merge_masks(a, b);
    CHECK(out.popcount() <= std::min(a.popcount(), b.popcount()));
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      const bool naive = a.data[i] && b.data[i];
      CHECK(bool(out.data[i]) == naive);
    }
  }
}
