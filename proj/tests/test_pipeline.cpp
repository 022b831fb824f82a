#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "afb/pipeline.hpp"
#include "afb/report.hpp"
#include "afb/rng.hpp"

using namespace afb;

TEST_CASE("a blank synthetic FOV reports zero bacilli") {
  GeneratorParams params;
  params.n_rods = 0;
  params.n_debris = 0;
  params.seed = 55;
  const auto [img, scene] = generate_scene(params);
  const FovReport report = detect_fov(img, "blank", PipelineConfig{});
  CHECK(report.bacilli_count == 0);
  CHECK(report.image_id == "blank");
}

TEST_CASE("a 12-rod FOV at the calibrated defaults counts all 12") {
  GeneratorParams params;
  params.n_rods = 12;
  params.n_debris = 0;
  params.seed = 404;
  const auto [img, scene] = generate_scene(params);
  REQUIRE(scene.rods.size() == 12);
  const FovReport report = detect_fov(img, "rods12", PipelineConfig{});
  CHECK(report.bacilli_count == 12);
}

TEST_CASE("detections carry the configuration digest") {
  GeneratorParams params;
  params.seed = 66;
  const auto [img, scene] = generate_scene(params);
  const PipelineConfig config;
  const FovReport report = detect_fov(img, "digest", config);
  CHECK(report.parameters_digest == parameters_digest(config));
  CHECK(report.parameters_digest.size() == 16);
}

TEST_CASE("detect_fov is deterministic for identical config and image") {
  GeneratorParams params;
  params.seed = 67;
  const auto [img, scene] = generate_scene(params);
  const PipelineConfig config;
  const FovReport a = detect_fov(img, "same", config);
  const FovReport b = detect_fov(img, "same", config);
  CHECK(fov_report_to_json(a) == fov_report_to_json(b));
}

TEST_CASE("debris-heavy FOVs produce no bacillus verdicts at defaults") {
  PipelineConfig config;
  GeneratorParams params = config.synth;
  params.n_rods = 0;
  params.n_debris = 9;
  SplitMix64 seeds(68);
  for (int i = 0; i < 5; ++i) {
    params.seed = seeds.next();
    const auto [img, scene] = generate_scene(params);
    const FovReport report = detect_fov(img, "debris", config);
    CHECK(report.bacilli_count == 0);
  }
}

TEST_CASE("calibrated gates satisfy min <= max for every descriptor") {
  const ClassifierGates gates = run_calibrate(PipelineConfig{}, 5);
  CHECK(gates.area.min <= gates.area.max);
  CHECK(gates.eccentricity.min <= gates.eccentricity.max);
  CHECK(gates.circularity.min <= gates.circularity.max);
  CHECK(gates.roughness.min <= gates.roughness.max);
  CHECK(gates.major_axis_length.min <= gates.major_axis_length.max);
  CHECK(gates.eccentricity.max <= 1.0);
  CHECK(gates.roughness.max <= 1.0);
}

TEST_CASE("calibration is a pure function of its seed") {
  const ClassifierGates a = run_calibrate(PipelineConfig{}, 9);
  const ClassifierGates b = run_calibrate(PipelineConfig{}, 9);
  CHECK(a.area.min == b.area.min);
  CHECK(a.area.max == b.area.max);
  CHECK(a.eccentricity.min == b.eccentricity.min);
  CHECK(a.major_axis_length.max == b.major_axis_length.max);
}

TEST_CASE("calibrated gates accept at least 98% of a held-out rod set") {
  PipelineConfig config;
  config.gates = run_calibrate(config, 42);

  GeneratorParams params = config.synth;
  params.n_debris = 0;
  SplitMix64 seeds(777);
  int rods = 0, accepted = 0;
  while (rods < 300) {
    params.seed = seeds.next();
    const auto [img, scene] = generate_scene(params);
    const FovReport report = detect_fov(img, "validation", config);
    rods += static_cast<int>(scene.rods.size());
    accepted += static_cast<int>(report.bacilli_count);
  }
  CHECK(static_cast<double>(accepted) / rods >= 0.98);
}

TEST_CASE("run_detect reports missing files as per-image failures") {
  const BatchOutcome outcome = run_detect(PipelineConfig{}, {"/nonexistent_afb/missing.png"},
                                          std::filesystem::temp_directory_path() / "afb_missing_out",
                                          false, 1);
  CHECK(outcome.processed == 0);
  REQUIRE(outcome.failures.size() == 1);
  CHECK(outcome.failures[0].path == std::filesystem::path("/nonexistent_afb/missing.png"));
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / "afb_missing_out");
}
