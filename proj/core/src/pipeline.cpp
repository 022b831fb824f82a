#include "afb/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "afb/image_io.hpp"
#include "afb/rng.hpp"
#include "afb/threshold.hpp"

namespace afb {

FovReport detect_fov(const RgbImage& img, const std::string& image_id,
                     const PipelineConfig& config) {
  auto [r, g, b] = split_planes(img);
  const RgbImage enhanced =
      merge_planes(contrast_stretch(r), contrast_stretch(g), contrast_stretch(b));
  const ScalarImage redness = redness_map(enhanced);

  const BinaryMask coarse = iterative_global_threshold(redness, config.coarse).second;
  const ScalarImage thresholds =
      config.sauvola_stride > 1
          ? sauvola_threshold_map_interpolated(redness, config.sauvola, config.sauvola_stride)
          : sauvola_threshold_map(redness, config.sauvola);
  const BinaryMask fine = binarize(redness, thresholds);
  const BinaryMask merged = merge_masks(coarse, fine, config.merge);

  const std::vector<Component> components =
      remove_small(label_components(merged), config.morphology_min_area);

  FovReport report;
  report.image_id = image_id;
  report.parameters_digest = parameters_digest(config);
  for (const Component& component : components) {
    try {
      const ShapeDescriptors d = compute_descriptors(component);
      report.detections.push_back(classify(component, d, config.gates));
    } catch (const DegenerateMoments&) {
      // Only possible when morphology.min_area is configured to 1.
      Detection det;
      det.component = component;
      det.verdict = Verdict::Debris;
      det.rejected_by = {"degenerate_moments"};
      report.detections.push_back(std::move(det));
    }
  }
  report.bacilli_count = static_cast<std::size_t>(
      std::count_if(report.detections.begin(), report.detections.end(),
                    [](const Detection& d) { return d.verdict == Verdict::Bacillus; }));
  return report;
}

BatchOutcome run_detect(const PipelineConfig& config,
                        const std::vector<std::filesystem::path>& images,
                        const std::filesystem::path& out_dir, bool write_overlays, int jobs) {
  std::filesystem::create_directories(out_dir);

  BatchOutcome outcome;
  std::mutex mutex;
  std::atomic<std::size_t> cursor{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= images.size()) return;
      const std::filesystem::path& path = images[i];
      try {
        const RgbImage img = load_image(path);
        const std::string stem = path.stem().string();
        const FovReport report = detect_fov(img, stem, config);

        std::ofstream rep(out_dir / (stem + ".report.json"), std::ios::trunc);
        if (!rep) throw Error("cannot write report for " + stem);
        rep << fov_report_to_json(report);
        rep.close();
        if (write_overlays) {
          save_png(render_overlay(img, report), out_dir / (stem + ".overlay.png"));
        }
        std::lock_guard lock(mutex);
        ++outcome.processed;
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        outcome.failures.push_back({path, e.what()});
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(images.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  std::sort(outcome.failures.begin(), outcome.failures.end(),
            [](const BatchFailure& a, const BatchFailure& b) { return a.path < b.path; });
  return outcome;
}

namespace {

double percentile(std::vector<double> values, double pct) {
  std::sort(values.begin(), values.end());
  const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

GateInterval gate_band(const std::vector<double>& values, const CalibrationProtocol& protocol,
                       double natural_min, double natural_max) {
  GateInterval gate;
  const double lo = percentile(values, protocol.lower_pct);
  const double hi = percentile(values, protocol.upper_pct);
  const double widen = (hi - lo) * protocol.margin;
  gate.min = std::max(natural_min, lo - widen);
  gate.max = std::min(natural_max, hi + widen);
  return gate;
}

}  // namespace

ClassifierGates run_calibrate(const PipelineConfig& config, std::uint64_t seed,
                              const CalibrationProtocol& protocol) {
  // Descriptor samples of pipeline-detected components matched to
  // ground-truth rods; gates must tolerate segmentation-induced shape
  // distortion, so the sample comes from the detection front end, not from
  // the clean silhouettes.
  std::vector<double> areas, eccs, circs, roughs, majors;
  int rods_seen = 0, debris_seen = 0;

  GeneratorParams scene_params = config.synth;
  SplitMix64 seed_stream(seed);

  constexpr int kMaxScenes = 10000;
  for (int scene_idx = 0; scene_idx < kMaxScenes; ++scene_idx) {
    if (rods_seen >= protocol.n_rods && debris_seen >= protocol.n_debris) break;
    scene_params.seed = seed_stream.next();
    const auto [img, scene] = generate_scene(scene_params);
    const FovReport report = detect_fov(img, "calibration", config);
    rods_seen += static_cast<int>(scene.rods.size());
    debris_seen += static_cast<int>(scene.debris.size());

    // Nearest unmatched component within 10 px of each rod centroid.
    std::vector<bool> used(report.detections.size(), false);
    for (const RodTruth& rod : scene.rods) {
      double best = 10.0;
      std::size_t best_idx = report.detections.size();
      for (std::size_t i = 0; i < report.detections.size(); ++i) {
        if (used[i]) continue;
        const auto& c = report.detections[i].component;
        const double d = std::hypot(c.centroid_x - rod.cx, c.centroid_y - rod.cy);
        if (d < best) {
          best = d;
          best_idx = i;
        }
      }
      if (best_idx == report.detections.size()) continue;
      used[best_idx] = true;
      const ShapeDescriptors& d = report.detections[best_idx].descriptors;
      areas.push_back(static_cast<double>(d.area));
      eccs.push_back(d.eccentricity);
      circs.push_back(d.circularity);
      roughs.push_back(d.roughness);
      majors.push_back(d.major_axis_length);
    }
  }
  if (areas.empty()) throw Error("calibrate: no rod components detected");

  constexpr double kInf = 1e300;
  ClassifierGates gates;
  gates.area = gate_band(areas, protocol, 1.0, kInf);
  gates.eccentricity = gate_band(eccs, protocol, 0.0, 1.0);
  gates.circularity = gate_band(circs, protocol, 0.0, kInf);
  gates.roughness = gate_band(roughs, protocol, 0.0, 1.0);
  gates.major_axis_length = gate_band(majors, protocol, 0.0, kInf);
  return gates;
}

EvalResult evaluate_corpus(const PipelineConfig& config,
                           const std::vector<std::pair<RgbImage, SyntheticScene>>& corpus,
                           double tolerance) {
  std::vector<EvalResult> results;
  results.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& [img, scene] = corpus[i];
    const std::string image_id = "fov_" + std::to_string(i);
    const FovReport report = detect_fov(img, image_id, config);
    EvalResult result = match_detections(report.detections, scene, tolerance);
    result.per_image.push_back({image_id, result.tp, result.fn, result.fp, result.tn});
    results.push_back(std::move(result));
  }
  return aggregate(results);
}

}  // namespace afb
