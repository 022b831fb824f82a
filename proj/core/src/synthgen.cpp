#include "afb/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "afb/rng.hpp"

namespace afb {

using ordered_json = nlohmann::ordered_json;

std::string to_string(DebrisKind k) {
  switch (k) {
    case DebrisKind::RoundBlob: return "round_blob";
    case DebrisKind::WrongColorRod: return "wrong_color_rod";
    case DebrisKind::Speck: return "speck";
  }
  throw Error("unknown debris kind");
}

DebrisKind debris_kind_from_string(const std::string& s) {
  if (s == "round_blob") return DebrisKind::RoundBlob;
  if (s == "wrong_color_rod") return DebrisKind::WrongColorRod;
  if (s == "speck") return DebrisKind::Speck;
  throw Error("unknown debris kind: " + s);
}

namespace {

// Squared distance from point p to the segment [a, b].
double segment_distance_sq(double px, double py, double ax, double ay, double bx, double by) {
  const double vx = bx - ax, vy = by - ay;
  const double wx = px - ax, wy = py - ay;
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx);
  const double dy = py - (ay + t * vy);
  return dx * dx + dy * dy;
}

// WrongColorRod capsule derived from its bounding radius.
void wrong_color_rod_shape(double radius, double& length, double& thickness) {
  length = 2.0 * radius;
  thickness = std::max(3.0, radius * 0.5);
}

}  // namespace

std::vector<PixelCoord> rasterize_capsule(double cx, double cy, double length, double thickness,
                                          double angle) {
  if (thickness < 1.0 || length < thickness) {
    throw Error("rasterize_capsule: need thickness >= 1 and length >= thickness");
  }
  // Spine of length (length - thickness): the caps complete the tip-to-tip
  // extent to `length`, so length == thickness degenerates to a disk.
  const double half_spine = (length - thickness) * 0.5;
  const double ux = std::cos(angle), uy = std::sin(angle);
  const double ax = cx - half_spine * ux, ay = cy - half_spine * uy;
  const double bx = cx + half_spine * ux, by = cy + half_spine * uy;
  const double radius = thickness * 0.5;
  const double radius_sq = radius * radius;

  const double reach = length * 0.5 + 1.0;
  const int x_lo = static_cast<int>(std::floor(cx - reach));
  const int x_hi = static_cast<int>(std::ceil(cx + reach));
  const int y_lo = static_cast<int>(std::floor(cy - reach));
  const int y_hi = static_cast<int>(std::ceil(cy + reach));

  std::vector<PixelCoord> pixels;
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      if (segment_distance_sq(x, y, ax, ay, bx, by) <= radius_sq) {
        pixels.push_back({x, y});
      }
    }
  }
  return pixels;
}

std::vector<PixelCoord> rasterize_disk(double cx, double cy, double radius) {
  const double radius_sq = radius * radius;
  const int x_lo = static_cast<int>(std::floor(cx - radius));
  const int x_hi = static_cast<int>(std::ceil(cx + radius));
  const int y_lo = static_cast<int>(std::floor(cy - radius));
  const int y_hi = static_cast<int>(std::ceil(cy + radius));

  std::vector<PixelCoord> pixels;
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= radius_sq) pixels.push_back({x, y});
    }
  }
  return pixels;
}

std::vector<PixelCoord> debris_silhouette(const DebrisTruth& d) {
  switch (d.kind) {
    case DebrisKind::RoundBlob:
    case DebrisKind::Speck:
      return rasterize_disk(d.cx, d.cy, d.radius);
    case DebrisKind::WrongColorRod: {
      double length = 0.0, thickness = 0.0;
      wrong_color_rod_shape(d.radius, length, thickness);
      return rasterize_capsule(d.cx, d.cy, length, thickness, d.angle);
    }
  }
  throw Error("unknown debris kind");
}

namespace {

constexpr int kPlacementAttempts = 10000;
constexpr int kClearancePx = 3;

struct Placer {
  int width, height;
  bool allow_touching;
  // Cells a new silhouette must avoid: union of placed silhouettes dilated
  // by a Euclidean disk of radius kClearancePx.
  std::vector<std::uint8_t> blocked;

  Placer(int w, int h, bool touching)
      : width(w), height(h), allow_touching(touching),
        blocked(static_cast<std::size_t>(w) * h, 0) {}

  bool fits(const std::vector<PixelCoord>& silhouette) const {
    for (const PixelCoord& p : silhouette) {
      if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) return false;
      if (!allow_touching && blocked[static_cast<std::size_t>(p.y) * width + p.x]) return false;
    }
    return true;
  }

  void stamp(const std::vector<PixelCoord>& silhouette) {
    if (allow_touching) return;
    for (const PixelCoord& p : silhouette) {
      for (int dy = -kClearancePx; dy <= kClearancePx; ++dy) {
        for (int dx = -kClearancePx; dx <= kClearancePx; ++dx) {
          if (dx * dx + dy * dy > kClearancePx * kClearancePx) continue;
          const int x = p.x + dx, y = p.y + dy;
          if (x < 0 || y < 0 || x >= width || y >= height) continue;
          blocked[static_cast<std::size_t>(y) * width + x] = 1;
        }
      }
    }
  }
};

void paint(RgbImage& img, const std::vector<PixelCoord>& silhouette, const ColorRgb& color) {
  for (const PixelCoord& p : silhouette) {
    std::uint8_t* px = img.at(p.x, p.y);
    px[0] = color.r;
    px[1] = color.g;
    px[2] = color.b;
  }
}

std::uint8_t noisy_level(double mean, double sigma, SplitMix64& rng) {
  const double v = sigma > 0.0 ? mean + sigma * rng.gaussian() : mean;
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

std::pair<RgbImage, SyntheticScene> generate_scene(const GeneratorParams& params) {
  if (params.width < 1 || params.height < 1) throw Error("generate_scene: empty image");
  if (params.n_rods < 0 || params.n_debris < 0) throw Error("generate_scene: negative counts");
  if (params.rod_length_min > params.rod_length_max ||
      params.rod_thickness_min > params.rod_thickness_max) {
    throw Error("generate_scene: empty rod size range");
  }

  SplitMix64 rng(params.seed);
  RgbImage img(params.width, params.height);
  SyntheticScene scene;
  scene.seed = params.seed;
  scene.width = params.width;
  scene.height = params.height;
  scene.allow_touching = params.allow_touching;

  // Background first so the draw sequence is independent of shape counts.
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    img.data[i * 3 + 0] = noisy_level(params.background.r, params.noise_sigma, rng);
    img.data[i * 3 + 1] = noisy_level(params.background.g, params.noise_sigma, rng);
    img.data[i * 3 + 2] = noisy_level(params.background.b, params.noise_sigma, rng);
  }

  Placer placer(params.width, params.height, params.allow_touching);

  auto place = [&](auto make_silhouette) -> std::vector<PixelCoord> {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      std::vector<PixelCoord> silhouette = make_silhouette();
      if (placer.fits(silhouette)) {
        placer.stamp(silhouette);
        return silhouette;
      }
    }
    throw PlacementFailure("generate_scene: no disjoint placement found within attempt budget");
  };

  for (int i = 0; i < params.n_rods; ++i) {
    RodTruth rod;
    const auto silhouette = place([&]() {
      rod.length = rng.uniform(params.rod_length_min, params.rod_length_max);
      const double t_hi =
          std::min(params.rod_thickness_max, rod.length / std::max(1.0, params.rod_min_aspect));
      rod.thickness = rng.uniform(params.rod_thickness_min, std::max(params.rod_thickness_min, t_hi));
      rod.angle = rng.uniform(0.0, 3.14159265358979323846);
      const double margin = rod.length * 0.5 + 1.0;
      rod.cx = rng.uniform(margin, params.width - 1 - margin);
      rod.cy = rng.uniform(margin, params.height - 1 - margin);
      return rasterize_capsule(rod.cx, rod.cy, rod.length, rod.thickness, rod.angle);
    });
    paint(img, silhouette, params.rod_color);
    scene.rods.push_back(rod);
  }

  for (int i = 0; i < params.n_debris; ++i) {
    DebrisTruth debris;
    debris.kind = static_cast<DebrisKind>(i % 3);
    const auto silhouette = place([&]() {
      switch (debris.kind) {
        case DebrisKind::RoundBlob:
          debris.radius = rng.uniform(params.blob_radius_min, params.blob_radius_max);
          debris.angle = 0.0;
          break;
        case DebrisKind::WrongColorRod:
          debris.radius = rng.uniform(params.rod_length_min, params.rod_length_max) * 0.5;
          debris.angle = rng.uniform(0.0, 3.14159265358979323846);
          break;
        case DebrisKind::Speck:
          debris.radius = rng.uniform(params.speck_radius_min, params.speck_radius_max);
          debris.angle = 0.0;
          break;
      }
      const double margin = debris.radius + 1.0;
      debris.cx = rng.uniform(margin, params.width - 1 - margin);
      debris.cy = rng.uniform(margin, params.height - 1 - margin);
      return debris_silhouette(debris);
    });
    paint(img, silhouette,
          debris.kind == DebrisKind::WrongColorRod ? params.wrong_color : params.rod_color);
    scene.debris.push_back(debris);
  }

  return {std::move(img), std::move(scene)};
}

std::string scene_to_json(const SyntheticScene& scene) {
  ordered_json rods = ordered_json::array();
  for (const RodTruth& r : scene.rods) {
    rods.push_back(ordered_json{{"cx", r.cx},
                                {"cy", r.cy},
                                {"length", r.length},
                                {"thickness", r.thickness},
                                {"angle", r.angle}});
  }
  ordered_json debris = ordered_json::array();
  for (const DebrisTruth& d : scene.debris) {
    debris.push_back(ordered_json{{"cx", d.cx},
                                  {"cy", d.cy},
                                  {"radius", d.radius},
                                  {"angle", d.angle},
                                  {"kind", to_string(d.kind)}});
  }
  const ordered_json doc{{"seed", scene.seed},
                         {"width", scene.width},
                         {"height", scene.height},
                         {"allow_touching", scene.allow_touching},
                         {"rods", rods},
                         {"debris", debris}};
  return doc.dump(2) + "\n";
}

SyntheticScene scene_from_json(const std::string& text) {
  try {
    const auto doc = ordered_json::parse(text);
    SyntheticScene scene;
    scene.seed = doc.at("seed").get<std::uint64_t>();
    scene.width = doc.at("width").get<int>();
    scene.height = doc.at("height").get<int>();
    scene.allow_touching = doc.at("allow_touching").get<bool>();
    for (const auto& rj : doc.at("rods")) {
      scene.rods.push_back({rj.at("cx").get<double>(), rj.at("cy").get<double>(),
                            rj.at("length").get<double>(), rj.at("thickness").get<double>(),
                            rj.at("angle").get<double>()});
    }
    for (const auto& dj : doc.at("debris")) {
      DebrisTruth d;
      d.cx = dj.at("cx").get<double>();
      d.cy = dj.at("cy").get<double>();
      d.radius = dj.at("radius").get<double>();
      d.angle = dj.at("angle").get<double>();
      d.kind = debris_kind_from_string(dj.at("kind").get<std::string>());
      scene.debris.push_back(d);
    }
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("scene sidecar JSON: ") + e.what());
  }
}

}  // namespace afb
