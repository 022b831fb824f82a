#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "afb/pipeline.hpp"
#include "afb/rng.hpp"
#include "afb/synthgen.hpp"

using namespace afb;

namespace {

std::set<std::pair<int, int>> as_set(const std::vector<PixelCoord>& pixels) {
  std::set<std::pair<int, int>> s;
  for (const auto& p : pixels) s.insert({p.x, p.y});
  return s;
}

double min_pixel_distance(const std::vector<PixelCoord>& a, const std::vector<PixelCoord>& b) {
  double best = 1e18;
  for (const auto& pa : a) {
    for (const auto& pb : b) {
      best = std::min(best, std::hypot(double(pa.x - pb.x), double(pa.y - pb.y)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("SplitMix64 reproduces the published reference outputs") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("SplitMix64 distribution helpers stay in range") {
  SplitMix64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto n = rng.uniform_int(-3, 3);
    CHECK(n >= -3);
    CHECK(n <= 3);
  }
}

TEST_CASE("capsule with length == thickness degenerates to a disk") {
  const auto capsule = rasterize_capsule(20.3, 21.7, 9.0, 9.0, 1.1);
  const auto disk = rasterize_disk(20.3, 21.7, 4.5);
  CHECK(as_set(capsule) == as_set(disk));
}

TEST_CASE("capsule pixel count approximates the continuous area") {
  struct Case {
    double length, thickness, angle;
  };
  for (const Case c : {Case{30, 6, 0.0}, Case{45, 8, 0.7}, Case{20, 5, 1.3}, Case{60, 10, 2.4}}) {
    const auto pixels = rasterize_capsule(70, 70, c.length, c.thickness, c.angle);
    const double spine = c.length - c.thickness;
    const double analytic =
        spine * c.thickness + std::numbers::pi * (c.thickness / 2.0) * (c.thickness / 2.0);
    CHECK(std::fabs(double(pixels.size()) - analytic) <= 0.15 * analytic);
  }
}

TEST_CASE("rotating a capsule by pi leaves the pixel set unchanged") {
  const auto a = rasterize_capsule(30.2, 29.8, 26.0, 6.0, 0.37);
  const auto b = rasterize_capsule(30.2, 29.8, 26.0, 6.0, 0.37 + std::numbers::pi);
  CHECK(as_set(a) == as_set(b));
}

TEST_CASE("capsule rejects invalid shape parameters") {
  CHECK_THROWS_AS(rasterize_capsule(10, 10, 5.0, 8.0, 0.0), Error);   // length < thickness
  CHECK_THROWS_AS(rasterize_capsule(10, 10, 5.0, 0.5, 0.0), Error);   // thickness < 1
}

TEST_CASE("identical seed and params give bit-identical scenes") {
  GeneratorParams params;
  params.seed = 31337;
  const auto [img_a, scene_a] = generate_scene(params);
  const auto [img_b, scene_b] = generate_scene(params);
  CHECK(img_a == img_b);
  CHECK(scene_to_json(scene_a) == scene_to_json(scene_b));
}

TEST_CASE("empty scene is pure noisy background and detects zero bacilli") {
  GeneratorParams params;
  params.n_rods = 0;
  params.n_debris = 0;
  params.seed = 9;
  const auto [img, scene] = generate_scene(params);
  CHECK(scene.rods.empty());
  CHECK(scene.debris.empty());

  const PipelineConfig config;
  const FovReport report = detect_fov(img, "blank", config);
  CHECK(report.bacilli_count == 0);
}

TEST_CASE("non-touching scenes keep all silhouettes disjoint with 3 px clearance") {
  GeneratorParams params;
  params.n_rods = 12;
  params.n_debris = 0;
  params.seed = 404;
  const auto [img, scene] = generate_scene(params);
  REQUIRE(scene.rods.size() == 12);

  std::vector<std::vector<PixelCoord>> silhouettes;
  for (const RodTruth& rod : scene.rods) {
    silhouettes.push_back(rasterize_capsule(rod.cx, rod.cy, rod.length, rod.thickness, rod.angle));
  }
  for (std::size_t i = 0; i < silhouettes.size(); ++i) {
    for (std::size_t j = i + 1; j < silhouettes.size(); ++j) {
      CHECK(min_pixel_distance(silhouettes[i], silhouettes[j]) >= 3.0);
    }
  }
}

TEST_CASE("every shape lies fully inside the image bounds") {
  GeneratorParams params;
  params.seed = 11;
  params.n_rods = 8;
  params.n_debris = 6;
  const auto [img, scene] = generate_scene(params);
  for (const RodTruth& rod : scene.rods) {
    for (const PixelCoord& p :
         rasterize_capsule(rod.cx, rod.cy, rod.length, rod.thickness, rod.angle)) {
      CHECK(p.x >= 0);
      CHECK(p.y >= 0);
      CHECK(p.x < params.width);
      CHECK(p.y < params.height);
    }
  }
  for (const DebrisTruth& d : scene.debris) {
    for (const PixelCoord& p : debris_silhouette(d)) {
      CHECK(p.x >= 0);
      CHECK(p.y >= 0);
      CHECK(p.x < params.width);
      CHECK(p.y < params.height);
    }
  }
}

TEST_CASE("rod silhouettes are redness-dominant at zero noise") {
  GeneratorParams params;
  params.noise_sigma = 0.0;
  params.seed = 21;
  const auto [img, scene] = generate_scene(params);
  for (const RodTruth& rod : scene.rods) {
    for (const PixelCoord& p :
         rasterize_capsule(rod.cx, rod.cy, rod.length, rod.thickness, rod.angle)) {
      const std::uint8_t* px = img.at(p.x, p.y);
      CHECK(double(px[0]) - (double(px[1]) + double(px[2])) / 2.0 > 0.0);
    }
  }
}

TEST_CASE("rods honor the configured minimum aspect ratio") {
  GeneratorParams params;
  params.seed = 77;
  params.n_rods = 10;
  const auto [img, scene] = generate_scene(params);
  for (const RodTruth& rod : scene.rods) {
    CHECK(rod.length / rod.thickness >= params.rod_min_aspect - 1e-9);
    CHECK(rod.length >= params.rod_length_min);
    CHECK(rod.length <= params.rod_length_max);
    CHECK(rod.thickness >= params.rod_thickness_min);
    CHECK(rod.thickness <= params.rod_thickness_max);
  }
}

TEST_CASE("debris kinds cycle through the three classes") {
  GeneratorParams params;
  params.seed = 5;
  params.n_rods = 0;
  params.n_debris = 6;
  const auto [img, scene] = generate_scene(params);
  REQUIRE(scene.debris.size() == 6);
  CHECK(scene.debris[0].kind == DebrisKind::RoundBlob);
  CHECK(scene.debris[1].kind == DebrisKind::WrongColorRod);
  CHECK(scene.debris[2].kind == DebrisKind::Speck);
  CHECK(scene.debris[3].kind == DebrisKind::RoundBlob);
}

TEST_CASE("impossible placement raises PlacementFailure") {
  GeneratorParams params;
  params.width = 64;
  params.height = 64;
  params.n_rods = 60;  // cannot fit disjointly
  params.seed = 1;
  CHECK_THROWS_AS(generate_scene(params), PlacementFailure);
}

TEST_CASE("scene sidecar JSON round-trips") {
  GeneratorParams params;
  params.seed = 314;
  const auto [img, scene] = generate_scene(params);
  const SyntheticScene back = scene_from_json(scene_to_json(scene));
  CHECK(back.seed == scene.seed);
  CHECK(back.width == scene.width);
  CHECK(back.height == scene.height);
  CHECK(back.allow_touching == scene.allow_touching);
  REQUIRE(back.rods.size() == scene.rods.size());
  for (std::size_t i = 0; i < scene.rods.size(); ++i) {
    CHECK(back.rods[i].cx == scene.rods[i].cx);
    CHECK(back.rods[i].length == scene.rods[i].length);
    CHECK(back.rods[i].angle == scene.rods[i].angle);
  }
  REQUIRE(back.debris.size() == scene.debris.size());
  for (std::size_t i = 0; i < scene.debris.size(); ++i) {
    CHECK(back.debris[i].kind == scene.debris[i].kind);
    CHECK(back.debris[i].radius == scene.debris[i].radius);
  }
}

TEST_CASE("debris kind strings round-trip") {
  for (const DebrisKind k :
       {DebrisKind::RoundBlob, DebrisKind::WrongColorRod, DebrisKind::Speck}) {
    CHECK(debris_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(debris_kind_from_string("dust"), Error);
}
