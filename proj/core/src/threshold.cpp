#include "afb/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace afb {

ScalarImage redness_map(const RgbImage& img) {
  ScalarImage out(img.width, img.height);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = img.data[i * 3 + 0];
    const double g = img.data[i * 3 + 1];
    const double b = img.data[i * 3 + 2];
    out.data[i] = std::clamp(r - (g + b) * 0.5, 0.0, 255.0);
  }
  return out;
}

std::pair<double, BinaryMask> iterative_global_threshold(const ScalarImage& map,
                                                         const IterativeThresholdParams& params) {
  const std::size_t n = map.data.size();
  double t = std::accumulate(map.data.begin(), map.data.end(), 0.0) / static_cast<double>(n);

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    double low_sum = 0.0, high_sum = 0.0;
    std::size_t low_n = 0, high_n = 0;
    for (const double v : map.data) {
      if (v <= t) {
        low_sum += v;
        ++low_n;
      } else {
        high_sum += v;
        ++high_n;
      }
    }
    // An empty class borrows the other class's mean, so a constant map
    // settles at T = v with an empty foreground.
    double low_mean = low_n ? low_sum / static_cast<double>(low_n) : 0.0;
    double high_mean = high_n ? high_sum / static_cast<double>(high_n) : 0.0;
    if (low_n == 0) low_mean = high_mean;
    if (high_n == 0) high_mean = low_mean;

    const double next = (low_mean + high_mean) * 0.5;
    const bool converged = std::fabs(next - t) < params.epsilon;
    t = next;
    if (converged) break;
  }

  BinaryMask mask(map.width, map.height);
  for (std::size_t i = 0; i < n; ++i) {
    mask.data[i] = map.data[i] > t ? 1 : 0;
  }
  return {t, mask};
}

namespace {

// Summed-area tables over values and squared values, one guard row/column.
struct IntegralTables {
  int width, height;
  std::vector<double> sum;
  std::vector<double> sq;

  explicit IntegralTables(const ScalarImage& map) : width(map.width), height(map.height) {
    const std::size_t stride = static_cast<std::size_t>(width) + 1;
    sum.assign(stride * (height + 1), 0.0);
    sq.assign(stride * (height + 1), 0.0);
    for (int y = 0; y < height; ++y) {
      double row_sum = 0.0, row_sq = 0.0;
      for (int x = 0; x < width; ++x) {
        const double v = map.at(x, y);
        row_sum += v;
        row_sq += v * v;
        sum[(y + 1) * stride + (x + 1)] = sum[y * stride + (x + 1)] + row_sum;
        sq[(y + 1) * stride + (x + 1)] = sq[y * stride + (x + 1)] + row_sq;
      }
    }
  }

  // Inclusive pixel rectangle [x0, x1] x [y0, y1].
  void rect(int x0, int y0, int x1, int y1, double& out_sum, double& out_sq) const {
    const std::size_t stride = static_cast<std::size_t>(width) + 1;
    const std::size_t a = static_cast<std::size_t>(y0) * stride + x0;
    const std::size_t b = static_cast<std::size_t>(y0) * stride + (x1 + 1);
    const std::size_t c = static_cast<std::size_t>(y1 + 1) * stride + x0;
    const std::size_t d = static_cast<std::size_t>(y1 + 1) * stride + (x1 + 1);
    out_sum = sum[d] - sum[b] - sum[c] + sum[a];
    out_sq = sq[d] - sq[b] - sq[c] + sq[a];
  }
};

void check_sauvola_params(const ScalarImage& map, const SauvolaParams& params) {
  if (map.width < 1 || map.height < 1) throw Error("sauvola: empty image");
  if (params.window < 3 || params.window % 2 == 0) {
    throw Error("sauvola: window must be odd and >= 3");
  }
  if (params.r_cap <= 0.0) throw Error("sauvola: R must be positive");
}

// t = m * (1 + k * (s/R - 1)) over the border-clipped window at (x, y).
double sauvola_at(const IntegralTables& tables, const SauvolaParams& params, int x, int y) {
  const int radius = params.window / 2;
  const int x0 = std::max(0, x - radius);
  const int y0 = std::max(0, y - radius);
  const int x1 = std::min(tables.width - 1, x + radius);
  const int y1 = std::min(tables.height - 1, y + radius);
  const double count = static_cast<double>((x1 - x0 + 1) * (y1 - y0 + 1));

  double window_sum = 0.0, window_sq = 0.0;
  tables.rect(x0, y0, x1, y1, window_sum, window_sq);

  const double mean = window_sum / count;
  const double variance = std::max(0.0, window_sq / count - mean * mean);
  const double stddev = std::sqrt(variance);
  return mean * (1.0 + params.k * (stddev / params.r_cap - 1.0));
}

}  // namespace

ScalarImage sauvola_threshold_map(const ScalarImage& map, const SauvolaParams& params) {
  check_sauvola_params(map, params);
  const IntegralTables tables(map);
  ScalarImage out(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      out.at(x, y) = sauvola_at(tables, params, x, y);
    }
  }
  return out;
}

ScalarImage sauvola_threshold_map_interpolated(const ScalarImage& map, const SauvolaParams& params,
                                               int stride) {
  check_sauvola_params(map, params);
  if (stride < 1) throw Error("sauvola: stride must be >= 1");

  const IntegralTables tables(map);
  const int w = map.width;
  const int h = map.height;
  const int radius = params.window / 2;
  ScalarImage out(w, h);

  // Interior = pixels whose window is not clipped by any border. The border
  // band is computed exactly: its clipped-window statistics are not a linear
  // blend of any lattice node's.
  const int lo_x = radius, hi_x = w - 1 - radius;
  const int lo_y = radius, hi_y = h - 1 - radius;
  if (lo_x > hi_x || lo_y > hi_y || stride == 1) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(x, y) = sauvola_at(tables, params, x, y);
    return out;
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (y < lo_y || y > hi_y || x < lo_x || x > hi_x) {
        out.at(x, y) = sauvola_at(tables, params, x, y);
      }
    }
  }

  // Stride-spaced interior lattice, always including the last row/column.
  auto lattice = [stride](int lo, int hi) {
    std::vector<int> ticks;
    for (int v = lo; v <= hi; v += stride) ticks.push_back(v);
    if (ticks.back() != hi) ticks.push_back(hi);
    return ticks;
  };
  const std::vector<int> xs = lattice(lo_x, hi_x);
  const std::vector<int> ys = lattice(lo_y, hi_y);

  std::vector<double> nodes(xs.size() * ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      nodes[j * xs.size() + i] = sauvola_at(tables, params, xs[i], ys[j]);
    }
  }

  // Cell index of the lattice interval containing v.
  auto cell = [stride](const std::vector<int>& ticks, int v) {
    std::size_t idx = static_cast<std::size_t>(v - ticks.front()) / static_cast<std::size_t>(stride);
    if (idx >= ticks.size() - 1) idx = ticks.size() - 2;
    while (ticks[idx + 1] < v) ++idx;
    return idx;
  };

  for (int y = lo_y; y <= hi_y; ++y) {
    const std::size_t j = ys.size() > 1 ? cell(ys, y) : 0;
    const int y0 = ys[j];
    const int y1 = ys[std::min(j + 1, ys.size() - 1)];
    const double fy = y1 > y0 ? static_cast<double>(y - y0) / (y1 - y0) : 0.0;
    for (int x = lo_x; x <= hi_x; ++x) {
      const std::size_t i = xs.size() > 1 ? cell(xs, x) : 0;
      const int x0 = xs[i];
      const int x1 = xs[std::min(i + 1, xs.size() - 1)];
      if (x == x0 && y == y0) {
        out.at(x, y) = nodes[j * xs.size() + i];
        continue;
      }
      const double fx = x1 > x0 ? static_cast<double>(x - x0) / (x1 - x0) : 0.0;
      const double t00 = nodes[j * xs.size() + i];
      const double t10 = nodes[j * xs.size() + std::min(i + 1, xs.size() - 1)];
      const double t01 = nodes[std::min(j + 1, ys.size() - 1) * xs.size() + i];
      const double t11 = nodes[std::min(j + 1, ys.size() - 1) * xs.size() + std::min(i + 1, xs.size() - 1)];
      const double top = t00 + (t10 - t00) * fx;
      const double bottom = t01 + (t11 - t01) * fx;
      out.at(x, y) = top + (bottom - top) * fy;
    }
  }
  return out;
}

BinaryMask binarize(const ScalarImage& map, const ScalarImage& thresholds) {
  if (map.width != thresholds.width || map.height != thresholds.height) {
    throw DimensionMismatch("binarize: map and threshold dimensions differ");
  }
  BinaryMask out(map.width, map.height);
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    out.data[i] = map.data[i] > thresholds.data[i] ? 1 : 0;
  }
  return out;
}

BinaryMask merge_masks(const BinaryMask& coarse, const BinaryMask& fine, MaskMerge mode) {
  if (coarse.width != fine.width || coarse.height != fine.height) {
    throw DimensionMismatch("merge_masks: mask dimensions differ");
  }
  BinaryMask out(coarse.width, coarse.height);
  for (std::size_t i = 0; i < coarse.data.size(); ++i) {
    out.data[i] = mode == MaskMerge::And ? (coarse.data[i] & fine.data[i])
                                         : (coarse.data[i] | fine.data[i]);
  }
  return out;
}

}  // namespace afb
