#include "afb/morphology.hpp"

#include <algorithm>
#include <numeric>

namespace afb {

namespace {

struct UnionFind {
  std::vector<int> parent;

  int make() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Component> label_components(const BinaryMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<int> labels(static_cast<std::size_t>(w) * h, -1);
  UnionFind uf;

  // First pass: scan previously-visited 8-neighbors (W, NW, N, NE).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      int label = -1;
      const int neighbors[4][2] = {{x - 1, y}, {x - 1, y - 1}, {x, y - 1}, {x + 1, y - 1}};
      for (const auto& n : neighbors) {
        if (n[0] < 0 || n[0] >= w || n[1] < 0) continue;
        const int nl = labels[static_cast<std::size_t>(n[1]) * w + n[0]];
        if (nl < 0) continue;
        if (label < 0) {
          label = nl;
        } else {
          uf.unite(label, nl);
        }
      }
      if (label < 0) label = uf.make();
      labels[static_cast<std::size_t>(y) * w + x] = label;
    }
  }

  // Second pass: gather pixels per root, in raster order.
  std::vector<int> root_to_index(uf.parent.size(), -1);
  std::vector<Component> components;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels[static_cast<std::size_t>(y) * w + x];
      if (l < 0) continue;
      const int root = uf.find(l);
      int idx = root_to_index[root];
      if (idx < 0) {
        idx = static_cast<int>(components.size());
        root_to_index[root] = idx;
        components.emplace_back();
        components.back().bbox = {x, y, x, y};
      }
      Component& c = components[static_cast<std::size_t>(idx)];
      c.pixels.push_back({x, y});
      c.bbox.x_min = std::min(c.bbox.x_min, x);
      c.bbox.x_max = std::max(c.bbox.x_max, x);
      c.bbox.y_min = std::min(c.bbox.y_min, y);
      c.bbox.y_max = std::max(c.bbox.y_max, y);
    }
  }

  for (Component& c : components) {
    double sx = 0.0, sy = 0.0;
    for (const PixelCoord& p : c.pixels) {
      sx += p.x;
      sy += p.y;
    }
    c.centroid_x = sx / static_cast<double>(c.pixels.size());
    c.centroid_y = sy / static_cast<double>(c.pixels.size());
  }

  // Canonical order: bbox (y_min, x_min), then (y_max, x_max), then first
  // pixel in raster order (unique for disjoint pixel sets).
  std::sort(components.begin(), components.end(), [w](const Component& a, const Component& b) {
    const auto key = [w](const Component& c) {
      return std::tuple(c.bbox.y_min, c.bbox.x_min, c.bbox.y_max, c.bbox.x_max,
                        static_cast<long>(c.pixels.front().y) * w + c.pixels.front().x);
    };
    return key(a) < key(b);
  });
  for (std::size_t i = 0; i < components.size(); ++i) {
    components[i].label = static_cast<int>(i) + 1;
  }
  return components;
}

std::vector<Component> remove_small(std::vector<Component> components, std::size_t min_area) {
  std::erase_if(components, [min_area](const Component& c) { return c.area() < min_area; });
  return components;
}

}  // namespace afb
