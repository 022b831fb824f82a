#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "afb/image.hpp"
#include "afb/morphology.hpp"

namespace afb {

enum class DebrisKind { RoundBlob, WrongColorRod, Speck };

std::string to_string(DebrisKind k);
DebrisKind debris_kind_from_string(const std::string& s);

struct RodTruth {
  double cx = 0.0;
  double cy = 0.0;
  double length = 0.0;     // tip-to-tip, caps included
  double thickness = 0.0;  // capsule diameter
  double angle = 0.0;      // radians
};

struct DebrisTruth {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;  // bounding-circle radius
  double angle = 0.0;   // radians; meaningful for WrongColorRod only
  DebrisKind kind = DebrisKind::RoundBlob;
};

// Ground truth for one generated field of view.
struct SyntheticScene {
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::vector<RodTruth> rods;
  std::vector<DebrisTruth> debris;
  bool allow_touching = false;
};

struct ColorRgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const ColorRgb&) const = default;
};

struct GeneratorParams {
  int width = 256;
  int height = 256;
  int n_rods = 10;
  int n_debris = 5;
  double rod_length_min = 15.0;
  double rod_length_max = 60.0;
  double rod_thickness_min = 4.0;
  double rod_thickness_max = 10.0;
  // Rods are elongated by definition; thickness is re-clamped so that
  // length / thickness >= min_aspect.
  double rod_min_aspect = 2.5;
  double blob_radius_min = 6.0;
  double blob_radius_max = 14.0;
  double speck_radius_min = 1.0;
  double speck_radius_max = 2.0;
  ColorRgb background{150, 160, 210};      // methylene-blue counterstain
  ColorRgb rod_color{170, 40, 90};         // carbol-fuchsin red/purple
  ColorRgb wrong_color{90, 110, 200};      // stained but not redness-dominant
  double noise_sigma = 6.0;
  std::uint64_t seed = 0;
  bool allow_touching = false;
};

// Pixels whose center lies within thickness/2 of the capsule's spine. The
// spine is the central segment of length (length - thickness), so `length`
// is the full tip-to-tip extent and length == thickness degenerates to a
// disk of that diameter.
std::vector<PixelCoord> rasterize_capsule(double cx, double cy, double length, double thickness,
                                          double angle);

std::vector<PixelCoord> rasterize_disk(double cx, double cy, double radius);

// Silhouette of one ground-truth debris object, matching what generate_scene
// renders for it.
std::vector<PixelCoord> debris_silhouette(const DebrisTruth& d);

// Renders a noisy bluish background, n_rods capsules in rod color and
// n_debris objects (kinds cycled RoundBlob, WrongColorRod, Speck, ...).
// Placement is rejection-sampled; with allow_touching = false silhouettes
// keep >= 3 px clearance. Identical params give bit-identical output.
// Throws PlacementFailure after 10000 failed attempts for a shape.
std::pair<RgbImage, SyntheticScene> generate_scene(const GeneratorParams& params);

// Ground-truth sidecar (External Interfaces): JSON document per image.
std::string scene_to_json(const SyntheticScene& scene);
SyntheticScene scene_from_json(const std::string& text);

}  // namespace afb
