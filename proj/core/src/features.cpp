#include "afb/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afb {

std::string to_string(Verdict v) { return v == Verdict::Bacillus ? "bacillus" : "debris"; }

namespace {

// Clockwise Moore neighborhood in screen coordinates (y grows downward),
// starting East.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_index(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kDx[d] == dx && kDy[d] == dy) return d;
  }
  throw Error("trace_contour: not a neighbor offset");
}

// Bbox-local occupancy bitmap with a 1-pixel guard band.
struct LocalGrid {
  int x0, y0, w, h;
  std::vector<std::uint8_t> cells;

  explicit LocalGrid(const Component& c) {
    x0 = c.bbox.x_min - 1;
    y0 = c.bbox.y_min - 1;
    w = c.bbox.width() + 2;
    h = c.bbox.height() + 2;
    cells.assign(static_cast<std::size_t>(w) * h, 0);
    for (const PixelCoord& p : c.pixels) {
      cells[static_cast<std::size_t>(p.y - y0) * w + (p.x - x0)] = 1;
    }
  }

  bool at(int x, int y) const {
    const int lx = x - x0, ly = y - y0;
    if (lx < 0 || ly < 0 || lx >= w || ly >= h) return false;
    return cells[static_cast<std::size_t>(ly) * w + lx] != 0;
  }
};

}  // namespace

std::vector<PixelCoord> trace_contour(const Component& c) {
  if (c.pixels.empty()) throw Error("trace_contour: empty component");
  if (c.pixels.size() == 1) return {c.pixels.front()};

  const LocalGrid grid(c);
  const PixelCoord start = c.pixels.front();  // raster-first pixel; its W neighbor is background

  // One Moore step: scan clockwise from the backtrack cell; returns the next
  // boundary pixel and the background cell scanned just before it.
  auto step = [&grid](PixelCoord cur, PixelCoord back, PixelCoord& next, PixelCoord& new_back) {
    const int d = direction_index(back.x - cur.x, back.y - cur.y);
    PixelCoord prev_bg = back;
    for (int i = 1; i <= 8; ++i) {
      const int nd = (d + i) % 8;
      const PixelCoord cand{cur.x + kDx[nd], cur.y + kDy[nd]};
      if (grid.at(cand.x, cand.y)) {
        next = cand;
        new_back = prev_bg;
        return;
      }
      prev_bg = cand;
    }
    throw Error("trace_contour: isolated pixel in multi-pixel component");
  };

  std::vector<PixelCoord> contour{start};
  PixelCoord back{start.x - 1, start.y};
  PixelCoord cur = start;

  PixelCoord first_move{};
  PixelCoord next{}, new_back{};
  step(cur, back, first_move, new_back);
  contour.push_back(first_move);
  cur = first_move;
  back = new_back;

  // Terminate when the walk repeats the initial directed edge start -> first_move.
  const std::size_t guard = 8 * c.pixels.size() + 16;
  for (std::size_t i = 0; i < guard; ++i) {
    step(cur, back, next, new_back);
    if (cur == start && next == first_move) {
      // Wrapped: the trailing revisit of start closes the contour implicitly.
      contour.pop_back();
      return contour;
    }
    contour.push_back(next);
    cur = next;
    back = new_back;
  }
  throw Error("trace_contour: walk failed to close");
}

double contour_perimeter(const std::vector<PixelCoord>& contour) {
  if (contour.size() == 1) return 4.0;  // pixel-edge convention
  const double diag = std::numbers::sqrt2;
  double perimeter = 0.0;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const PixelCoord& a = contour[i];
    const PixelCoord& b = contour[(i + 1) % contour.size()];
    perimeter += (a.x != b.x && a.y != b.y) ? diag : 1.0;
  }
  return perimeter;
}

namespace {

double cross(const PixelCoord& o, const PixelCoord& a, const PixelCoord& b) {
  return static_cast<double>(a.x - o.x) * (b.y - o.y) -
         static_cast<double>(a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain over pixel centers; collinear points dropped.
std::vector<PixelCoord> convex_hull(std::vector<PixelCoord> pts) {
  std::sort(pts.begin(), pts.end(), [](const PixelCoord& a, const PixelCoord& b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;

  std::vector<PixelCoord> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point equals the first
  return hull;
}

double polygon_perimeter(const std::vector<PixelCoord>& poly) {
  if (poly.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const PixelCoord& a = poly[i];
    const PixelCoord& b = poly[(i + 1) % poly.size()];
    total += std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
  }
  return total;
}

}  // namespace

ShapeDescriptors compute_descriptors(const Component& c) {
  ShapeDescriptors d;
  d.area = c.pixels.size();

  const auto contour = trace_contour(c);
  d.perimeter = contour_perimeter(contour);
  d.circularity = 4.0 * std::numbers::pi * static_cast<double>(d.area) / (d.perimeter * d.perimeter);

  // Second central moments of the pixel coordinates, population-normalized.
  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
  for (const PixelCoord& p : c.pixels) {
    const double dx = p.x - c.centroid_x;
    const double dy = p.y - c.centroid_y;
    mu20 += dx * dx;
    mu02 += dy * dy;
    mu11 += dx * dy;
  }
  const double area = static_cast<double>(d.area);
  const double cxx = mu20 / area, cyy = mu02 / area, cxy = mu11 / area;
  const double half_trace = (cxx + cyy) * 0.5;
  const double det_root = std::sqrt(std::max(0.0, half_trace * half_trace - (cxx * cyy - cxy * cxy)));
  const double lambda_major = half_trace + det_root;
  const double lambda_minor = std::max(0.0, half_trace - det_root);
  if (lambda_major <= 0.0) {
    throw DegenerateMoments("compute_descriptors: moment ellipse collapsed (single pixel?)");
  }
  d.major_axis_length = 4.0 * std::sqrt(lambda_major);
  d.minor_axis_length = 4.0 * std::sqrt(lambda_minor);
  d.eccentricity = std::sqrt(1.0 - lambda_minor / lambda_major);

  // Hull over boundary points only; interior pixels cannot be hull vertices.
  d.convex_hull_perimeter = polygon_perimeter(convex_hull(contour));
  d.roughness = d.convex_hull_perimeter / d.perimeter;
  return d;
}

Detection classify(Component component, const ShapeDescriptors& d, const ClassifierGates& gates) {
  Detection det;
  det.component = std::move(component);
  det.descriptors = d;

  const std::pair<const char*, bool> checks[] = {
      {"area", gates.area.contains(static_cast<double>(d.area))},
      {"eccentricity", gates.eccentricity.contains(d.eccentricity)},
      {"circularity", gates.circularity.contains(d.circularity)},
      {"roughness", gates.roughness.contains(d.roughness)},
      {"major_axis_length", gates.major_axis_length.contains(d.major_axis_length)},
  };
  for (const auto& [name, ok] : checks) {
    if (!ok) det.rejected_by.emplace_back(name);
  }
  det.verdict = det.rejected_by.empty() ? Verdict::Bacillus : Verdict::Debris;
  return det;
}

}  // namespace afb
