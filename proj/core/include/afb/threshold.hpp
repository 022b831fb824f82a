#pragma once

#include <utility>

#include "afb/image.hpp"

namespace afb {

// Parameters of the Sauvola local threshold
//   t(x,y) = m(x,y) * (1 + k * (s(x,y)/R - 1))
// where m and s are the mean and population standard deviation of the
// W x W window centered at (x,y), clipped at image borders.
struct SauvolaParams {
  int window = 15;      // odd, >= 3
  double k = 0.34;      // sensitivity, [0.2, 0.5]
  double r_cap = 128.0; // dynamic range of the standard deviation, > 0
};

struct IterativeThresholdParams {
  double epsilon = 0.5;     // convergence tolerance on T, intensity levels
  int max_iterations = 100;
};

// Mask combination mode for merge_masks / the pipeline.
enum class MaskMerge { And, Or };

// Bacilli-color channel: per pixel clamp(R - (G+B)/2, 0, 255).
// High values mark red/purple (carbol-fuchsin stained) pixels.
ScalarImage redness_map(const RgbImage& img);

// Mean-of-class-means global threshold. Starts from the global mean and
// iterates T <- (mean(values <= T) + mean(values > T)) / 2 until the change
// drops below epsilon or the iteration cap is hit. An empty class takes the
// other class's mean, so a constant map yields T = v and an empty mask.
// Foreground is value > T.
std::pair<double, BinaryMask> iterative_global_threshold(const ScalarImage& map,
                                                         const IterativeThresholdParams& params = {});

// Per-pixel Sauvola thresholds via integral images (sum and sum of squares),
// O(N^2) total regardless of window size.
ScalarImage sauvola_threshold_map(const ScalarImage& map, const SauvolaParams& params = {});

// Fast path: thresholds computed exactly on a stride-spaced lattice and
// bilinearly interpolated in between. Pixels whose window is clipped by the
// image border are always computed exactly (interpolation across the border
// band would not be faithful to the clipped-window statistics there).
// stride = 1 is bit-identical to sauvola_threshold_map.
ScalarImage sauvola_threshold_map_interpolated(const ScalarImage& map, const SauvolaParams& params,
                                               int stride);

// Foreground where g(x,y) > t(x,y). Throws DimensionMismatch.
BinaryMask binarize(const ScalarImage& map, const ScalarImage& thresholds);

// Pixelwise combination of the coarse and fine masks. Throws DimensionMismatch.
BinaryMask merge_masks(const BinaryMask& coarse, const BinaryMask& fine,
                       MaskMerge mode = MaskMerge::And);

}  // namespace afb
