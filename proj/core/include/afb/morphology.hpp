#pragma once

#include <cstdint>
#include <vector>

#include "afb/image.hpp"

namespace afb {

struct PixelCoord {
  int x = 0;
  int y = 0;
  bool operator==(const PixelCoord&) const = default;
};

struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;  // inclusive
  int y_max = 0;  // inclusive
  bool operator==(const BoundingBox&) const = default;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
};

// One 8-connected foreground blob. Pixels are stored in raster order.
struct Component {
  int label = 0;
  std::vector<PixelCoord> pixels;
  BoundingBox bbox;
  double centroid_x = 0.0;
  double centroid_y = 0.0;

  std::size_t area() const { return pixels.size(); }
};

// Two-pass 8-connected labeling with union-find. Components are returned in
// canonical order: sorted by bbox (y_min, x_min), ties broken by
// (y_max, x_max) and finally by first pixel in raster order; labels are
// reassigned 1..n in that order.
std::vector<Component> label_components(const BinaryMask& mask);

// Drops components with fewer than min_area pixels (boundary inclusive:
// exactly min_area survives). Order and labels are preserved.
std::vector<Component> remove_small(std::vector<Component> components, std::size_t min_area);

}  // namespace afb
