#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "afb/config.hpp"
#include "afb/evaluate.hpp"
#include "afb/report.hpp"

namespace afb {

// Full single-FOV pass: enhance -> redness -> coarse + fine threshold ->
// merge -> label -> size filter -> descriptors -> classify.
FovReport detect_fov(const RgbImage& img, const std::string& image_id,
                     const PipelineConfig& config);

struct BatchFailure {
  std::filesystem::path path;
  std::string message;
};

struct BatchOutcome {
  std::size_t processed = 0;
  std::vector<BatchFailure> failures;
};

// Runs detect_fov over a batch of image files, writing <stem>.report.json
// (and <stem>.overlay.png when write_overlays) into out_dir. Images may be
// processed concurrently up to `jobs`; per-image outputs are independent of
// scheduling. Decode or I/O failures are collected per image, not fatal.
BatchOutcome run_detect(const PipelineConfig& config,
                        const std::vector<std::filesystem::path>& images,
                        const std::filesystem::path& out_dir, bool write_overlays, int jobs);

// Gate calibration: generates synthetic scenes until the corpus holds at
// least `n_rods` rod and `n_debris` debris ground-truth objects, runs the
// detection front end, and sets each gate to the [lower_pct, upper_pct]
// percentile band of the rod-class descriptors, widened by `margin` of the
// band width on each side and clamped to natural descriptor bounds.
struct CalibrationProtocol {
  int n_rods = 200;
  int n_debris = 200;
  double lower_pct = 1.0;
  double upper_pct = 99.0;
  // Fraction of the percentile band added on each side. The bare 1-99 band
  // clips ~2% of fresh rods per gate, compounding to ~90% joint acceptance
  // across five gates; 0.10 widening restores ~99% while debris classes
  // stay far outside every band.
  double margin = 0.10;
};

ClassifierGates run_calibrate(const PipelineConfig& config, std::uint64_t seed,
                              const CalibrationProtocol& protocol = {});

// Detects every (image, truth sidecar) pair in-memory and pools the
// per-image confusion counts.
EvalResult evaluate_corpus(const PipelineConfig& config,
                           const std::vector<std::pair<RgbImage, SyntheticScene>>& corpus,
                           double tolerance = 10.0);

}  // namespace afb
