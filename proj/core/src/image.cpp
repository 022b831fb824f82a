#include "afb/image.hpp"

#include <algorithm>
#include <cmath>

namespace afb {

std::size_t BinaryMask::popcount() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

std::tuple<ScalarImage, ScalarImage, ScalarImage> split_planes(const RgbImage& img) {
  ScalarImage r(img.width, img.height);
  ScalarImage g(img.width, img.height);
  ScalarImage b(img.width, img.height);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    r.data[i] = img.data[i * 3 + 0];
    g.data[i] = img.data[i * 3 + 1];
    b.data[i] = img.data[i * 3 + 2];
  }
  return {std::move(r), std::move(g), std::move(b)};
}

namespace {

std::uint8_t to_level(double v) {
  // Half-up rounding onto the 8-bit scale.
  const double rounded = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

}  // namespace

RgbImage merge_planes(const ScalarImage& r, const ScalarImage& g, const ScalarImage& b) {
  if (r.width != g.width || r.width != b.width || r.height != g.height || r.height != b.height) {
    throw DimensionMismatch("merge_planes: plane dimensions differ");
  }
  RgbImage out(r.width, r.height);
  const std::size_t n = out.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i * 3 + 0] = to_level(r.data[i]);
    out.data[i * 3 + 1] = to_level(g.data[i]);
    out.data[i * 3 + 2] = to_level(b.data[i]);
  }
  return out;
}

ScalarImage contrast_stretch(const ScalarImage& plane, const ContrastStretchSpec& spec) {
  const auto [lo_it, hi_it] = std::minmax_element(plane.data.begin(), plane.data.end());
  if (plane.data.empty() || *lo_it == *hi_it) {
    // No contrast to stretch; a blank FOV must pass through untouched.
    return plane;
  }
  const double f_min = *lo_it;
  const double f_max = *hi_it;
  const double out_span = spec.out_max - spec.out_min;
  const double in_span = f_max - f_min;

  // Multiply before dividing: for 8-bit levels the numerator is an exact
  // integer, so ties like 127.5 survive to the half-up rounding intact.
  ScalarImage out(plane.width, plane.height);
  for (std::size_t i = 0; i < plane.data.size(); ++i) {
    out.data[i] = std::floor(out_span * (plane.data[i] - f_min) / in_span + spec.out_min + 0.5);
  }
  return out;
}

}  // namespace afb
