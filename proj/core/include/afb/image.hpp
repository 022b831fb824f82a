#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "afb/errors.hpp"

namespace afb {

// 8-bit RGB raster, row-major interleaved triples.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // size = width * height * 3

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  const std::uint8_t* at(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  std::uint8_t* at(int x, int y) {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool operator==(const RgbImage&) const = default;
};

// Single-channel raster of real values.
struct ScalarImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // size = width * height

  ScalarImage() = default;
  ScalarImage(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const ScalarImage&) const = default;
};

// Boolean foreground mask, one byte per pixel (0 = background, 1 = foreground).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // size = width * height

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

  std::size_t popcount() const;

  bool operator==(const BinaryMask&) const = default;
};

// Target output range for contrast stretching. The source range is taken
// from the plane's own extrema inside contrast_stretch.
struct ContrastStretchSpec {
  double out_min = 0.0;
  double out_max = 255.0;
};

// Splits an interleaved RGB image into its three planes (R, G, B order).
std::tuple<ScalarImage, ScalarImage, ScalarImage> split_planes(const RgbImage& img);

// Inverse of split_planes. Values are expected in [0, 255] and are written
// back as 8-bit samples (rounded half-up). Throws DimensionMismatch.
RgbImage merge_planes(const ScalarImage& r, const ScalarImage& g, const ScalarImage& b);

// Linear auto-scaling of one plane onto [out_min, out_max]:
//   p = (out_max - out_min) / (f_max - f_min) * (q - f_min) + out_min
// rounded half-up to integer levels. f_min/f_max are the plane's exact
// extrema. A constant plane (f_min = f_max) is returned unchanged.
ScalarImage contrast_stretch(const ScalarImage& plane, const ContrastStretchSpec& spec = {});

}  // namespace afb
