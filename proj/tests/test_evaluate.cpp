#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "afb/evaluate.hpp"
#include "afb/rng.hpp"
#include "oracles.hpp"

using namespace afb;

namespace {

// Minimal Bacillus detection centered at (cx, cy) with a 2x2 pixel block.
Detection detection_at(double cx, double cy, Verdict verdict = Verdict::Bacillus) {
  Detection det;
  const int x = static_cast<int>(std::lround(cx));
  const int y = static_cast<int>(std::lround(cy));
  det.component.pixels = {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}};
  det.component.bbox = {x, y, x + 1, y + 1};
  det.component.centroid_x = cx;
  det.component.centroid_y = cy;
  det.verdict = verdict;
  if (verdict == Verdict::Debris) det.rejected_by = {"eccentricity"};
  return det;
}

SyntheticScene scene_with_rods(const std::vector<std::pair<double, double>>& centers) {
  SyntheticScene scene;
  scene.width = 512;
  scene.height = 512;
  for (const auto& [cx, cy] : centers) scene.rods.push_back({cx, cy, 30.0, 6.0, 0.0});
  return scene;
}

}  // namespace

TEST_CASE("perfect detection gives unit sensitivity and specificity") {
  SyntheticScene scene = scene_with_rods({{50, 50}, {150, 50}, {250, 50}});
  scene.debris.push_back({50, 150, 8.0, 0.0, DebrisKind::RoundBlob});
  scene.debris.push_back({150, 150, 2.0, 0.0, DebrisKind::Speck});

  std::vector<Detection> detections = {detection_at(50, 50), detection_at(150, 50),
                                       detection_at(250, 50)};
  const EvalResult r = match_detections(detections, scene);
  CHECK(r.tp == 3);
  CHECK(r.fn == 0);
  CHECK(r.fp == 0);
  CHECK(r.tn == 2);
  CHECK(r.sensitivity().value() == 1.0);
  CHECK(r.specificity().value() == 1.0);
}

TEST_CASE("zero detections with rods present gives zero sensitivity") {
  const SyntheticScene scene = scene_with_rods({{60, 60}, {120, 120}});
  const EvalResult r = match_detections({}, scene);
  CHECK(r.tp == 0);
  CHECK(r.fn == 2);
  CHECK(r.sensitivity().value() == 0.0);
  CHECK_FALSE(r.specificity().has_value());  // no debris, denominator 0
}

TEST_CASE("spec example: 8 of 10 rods, one debris-claiming spurious detection") {
  std::vector<std::pair<double, double>> rod_centers;
  for (int i = 0; i < 10; ++i) rod_centers.push_back({40.0 + 45.0 * i, 60.0});
  SyntheticScene scene = scene_with_rods(rod_centers);
  for (int i = 0; i < 5; ++i) {
    scene.debris.push_back({40.0 + 45.0 * i, 200.0, 8.0, 0.0, DebrisKind::RoundBlob});
  }

  std::vector<Detection> detections;
  for (int i = 0; i < 8; ++i) {
    detections.push_back(detection_at(40.0 + 45.0 * i + 1.5, 59.0));
  }
  // The spurious Bacillus verdict sits on debris[0]: it claims that debris
  // (not a TN) and matches no rod (an FP).
  detections.push_back(detection_at(40.0, 200.0));

  const EvalResult r = match_detections(detections, scene);
  CHECK(r.tp == 8);
  CHECK(r.fn == 2);
  CHECK(r.fp == 1);
  CHECK(r.tn == 4);
  CHECK(r.sensitivity().value() == doctest::Approx(0.8));
  CHECK(r.specificity().value() == doctest::Approx(0.8));
  CHECK(r.tp == oracle::exhaustive_max_matching(
                    {{41.5, 59}, {86.5, 59}, {131.5, 59}, {176.5, 59}, {221.5, 59},
                     {266.5, 59}, {311.5, 59}, {356.5, 59}, {40, 200}},
                    rod_centers, 10.0));
}

TEST_CASE("debris-verdict detections never count as false positives") {
  SyntheticScene scene = scene_with_rods({{60, 60}});
  scene.debris.push_back({160, 160, 8.0, 0.0, DebrisKind::RoundBlob});
  const std::vector<Detection> detections = {detection_at(60, 60),
                                             detection_at(160, 160, Verdict::Debris)};
  const EvalResult r = match_detections(detections, scene);
  CHECK(r.tp == 1);
  CHECK(r.fp == 0);
  CHECK(r.tn == 1);  // debris-verdict overlap does not claim the debris
}

TEST_CASE("matching is one-to-one: duplicate detections on one rod leave one FP") {
  const SyntheticScene scene = scene_with_rods({{80, 80}});
  const std::vector<Detection> detections = {detection_at(80, 80), detection_at(83, 80)};
  const EvalResult r = match_detections(detections, scene);
  CHECK(r.tp == 1);
  CHECK(r.fn == 0);
  CHECK(r.fp == 1);
}

TEST_CASE("tp + fn always equals the rod count") {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int n_rods = static_cast<int>(rng.uniform_int(0, 8));
    std::vector<std::pair<double, double>> centers;
    for (int i = 0; i < n_rods; ++i) {
      centers.push_back({40.0 + 55.0 * i, rng.uniform(40.0, 400.0)});
    }
    const SyntheticScene scene = scene_with_rods(centers);
    std::vector<Detection> detections;
    const int n_det = static_cast<int>(rng.uniform_int(0, 8));
    for (int i = 0; i < n_det; ++i) {
      detections.push_back(detection_at(rng.uniform(20.0, 480.0), rng.uniform(20.0, 480.0)));
    }
    const EvalResult r = match_detections(detections, scene);
    CHECK(r.tp + r.fn == scene.rods.size());
    CHECK(r.tp + r.fp <= detections.size());
  }
}

TEST_CASE("greedy matching equals exhaustive assignment under separation") {
  // Rod separation > 2 * tolerance guarantees greedy optimality.
  SplitMix64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_rods = static_cast<int>(rng.uniform_int(1, 8));
    std::vector<std::pair<double, double>> rods;
    for (int i = 0; i < n_rods; ++i) {
      rods.push_back({30.0 + 60.0 * i, 30.0 + 50.0 * static_cast<double>(rng.uniform_int(0, 8))});
    }
    std::vector<std::pair<double, double>> det_centers;
    std::vector<Detection> detections;
    for (const auto& [rx, ry] : rods) {
      if (rng.next_double() < 0.8) {  // detected, with positional error
        const double dx = rng.uniform(-6.0, 6.0), dy = rng.uniform(-6.0, 6.0);
        det_centers.push_back({rx + dx, ry + dy});
        detections.push_back(detection_at(rx + dx, ry + dy));
      }
    }
    if (rng.next_double() < 0.5) {  // spurious detection far away
      det_centers.push_back({470.0, 470.0});
      detections.push_back(detection_at(470.0, 470.0));
    }
    const SyntheticScene scene = scene_with_rods(rods);
    const EvalResult greedy = match_detections(detections, scene, 10.0);
    CHECK(greedy.tp == oracle::exhaustive_max_matching(det_centers, rods, 10.0));
  }
}

TEST_CASE("aggregate pools counts and recomputes pooled rates") {
  EvalResult a;
  a.tp = 8;
  a.fn = 2;
  a.fp = 1;
  a.tn = 4;
  a.per_image.push_back({"img0", 8, 2, 1, 4});

  SUBCASE("single result aggregates to itself") {
    const EvalResult pooled = aggregate({a});
    CHECK(pooled.tp == a.tp);
    CHECK(pooled.sensitivity().value() == a.sensitivity().value());
    CHECK(pooled.per_image.size() == 1);
  }
  SUBCASE("two identical results double counts, keep rates") {
    const EvalResult pooled = aggregate({a, a});
    CHECK(pooled.tp == 16);
    CHECK(pooled.fn == 4);
    CHECK(pooled.sensitivity().value() == doctest::Approx(0.8));
    CHECK(pooled.specificity().value() == doctest::Approx(0.8));
    CHECK(pooled.per_image.size() == 2);
  }
  SUBCASE("heterogeneous results pool to hand-computed totals") {
    EvalResult b;
    b.tp = 1;
    b.fn = 3;
    b.fp = 0;
    b.tn = 2;
    const EvalResult pooled = aggregate({a, b});
    CHECK(pooled.tp == 9);
    CHECK(pooled.fn == 5);
    CHECK(pooled.fp == 1);
    CHECK(pooled.tn == 6);
    CHECK(pooled.sensitivity().value() == doctest::Approx(9.0 / 14.0));
    CHECK(pooled.specificity().value() == doctest::Approx(6.0 / 7.0));
  }
}

TEST_CASE("aggregate rejects an empty list") {
  CHECK_THROWS_AS(aggregate({}), Error);
}

TEST_CASE("evaluation summary JSON reports absent rates as null") {
  EvalResult r;  // all counts zero
  const std::string json = eval_result_to_json(r, "deadbeef00000000");
  CHECK(json.find("\"sensitivity\": null") != std::string::npos);
  CHECK(json.find("\"specificity\": null") != std::string::npos);
  CHECK(json.find("deadbeef00000000") != std::string::npos);
}
