#include "afb/evaluate.hpp"

#include <algorithm>
#include <set>
#include <cmath>

#include <json.hpp>

namespace afb {

using ordered_json = nlohmann::ordered_json;

EvalResult match_detections(const std::vector<Detection>& detections, const SyntheticScene& scene,
                            double tolerance) {
  std::vector<std::size_t> bacilli;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].verdict == Verdict::Bacillus) bacilli.push_back(i);
  }

  // All candidate (detection, rod) pairs within tolerance, closest first;
  // ties broken by indices for determinism.
  struct Pair {
    double dist;
    std::size_t det;
    std::size_t rod;
  };
  std::vector<Pair> pairs;
  for (const std::size_t di : bacilli) {
    const Detection& det = detections[di];
    for (std::size_t ri = 0; ri < scene.rods.size(); ++ri) {
      const double d = std::hypot(det.component.centroid_x - scene.rods[ri].cx,
                                  det.component.centroid_y - scene.rods[ri].cy);
      if (d <= tolerance) pairs.push_back({d, di, ri});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.det, a.rod) < std::tie(b.dist, b.det, b.rod);
  });

  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> rod_used(scene.rods.size(), false);
  std::size_t matched = 0;
  for (const Pair& p : pairs) {
    if (det_used[p.det] || rod_used[p.rod]) continue;
    det_used[p.det] = true;
    rod_used[p.rod] = true;
    ++matched;
  }

  EvalResult result;
  result.tp = matched;
  result.fn = scene.rods.size() - matched;
  for (const std::size_t di : bacilli) {
    if (!det_used[di]) ++result.fp;
  }

  // A debris object is a true negative unless some Bacillus detection
  // overlaps its rendered silhouette.
  for (const DebrisTruth& d : scene.debris) {
    std::set<std::pair<int, int>> silhouette;
    for (const PixelCoord& p : debris_silhouette(d)) silhouette.insert({p.x, p.y});
    bool claimed = false;
    for (const std::size_t di : bacilli) {
      for (const PixelCoord& p : detections[di].component.pixels) {
        if (silhouette.count({p.x, p.y})) {
          claimed = true;
          break;
        }
      }
      if (claimed) break;
    }
    if (!claimed) ++result.tn;
  }
  return result;
}

EvalResult aggregate(const std::vector<EvalResult>& results) {
  if (results.empty()) throw Error("aggregate: empty result list");
  EvalResult pooled;
  for (const EvalResult& r : results) {
    pooled.tp += r.tp;
    pooled.fn += r.fn;
    pooled.fp += r.fp;
    pooled.tn += r.tn;
    pooled.per_image.insert(pooled.per_image.end(), r.per_image.begin(), r.per_image.end());
  }
  return pooled;
}

std::string eval_result_to_json(const EvalResult& result, const std::string& parameters_digest) {
  ordered_json per_image = ordered_json::array();
  for (const auto& row : result.per_image) {
    per_image.push_back(ordered_json{{"image_id", row.image_id},
                                     {"tp", row.tp},
                                     {"fn", row.fn},
                                     {"fp", row.fp},
                                     {"tn", row.tn}});
  }
  ordered_json doc{{"tp", result.tp}, {"fn", result.fn}, {"fp", result.fp}, {"tn", result.tn}};
  const auto sens = result.sensitivity();
  const auto spec = result.specificity();
  doc["sensitivity"] = sens ? ordered_json(*sens) : ordered_json(nullptr);
  doc["specificity"] = spec ? ordered_json(*spec) : ordered_json(nullptr);
  doc["per_image"] = per_image;
  doc["parameters_digest"] = parameters_digest;
  return doc.dump(2) + "\n";
}

}  // namespace afb
