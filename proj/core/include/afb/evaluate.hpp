#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afb/features.hpp"
#include "afb/synthgen.hpp"

namespace afb {

// Object-level confusion counts. Rates are recomputed from counts and
// reported absent when their denominator is zero.
struct EvalResult {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  struct PerImage {
    std::string image_id;
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
  };
  std::vector<PerImage> per_image;

  std::optional<double> sensitivity() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  std::optional<double> specificity() const {
    if (tn + fp == 0) return std::nullopt;
    return static_cast<double>(tn) / static_cast<double>(tn + fp);
  }
};

// Greedy one-to-one matching by centroid distance, closest pair first:
//   matched rods -> TP, unmatched rods -> FN, unmatched Bacillus
//   detections -> FP, debris with no overlapping Bacillus detection -> TN.
// A detection overlaps a debris object when any of its pixels lies on the
// debris silhouette. Only Bacillus-verdict detections participate.
EvalResult match_detections(const std::vector<Detection>& detections, const SyntheticScene& scene,
                            double tolerance = 10.0);

// Pools counts (micro-averaging) and concatenates per-image rows.
EvalResult aggregate(const std::vector<EvalResult>& results);

// Evaluation summary (External Interfaces): counts, rates, per-image rows,
// configuration digest.
std::string eval_result_to_json(const EvalResult& result, const std::string& parameters_digest);

}  // namespace afb
