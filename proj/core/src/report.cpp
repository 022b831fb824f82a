#include "afb/report.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace afb {

using ordered_json = nlohmann::ordered_json;

std::string to_string(SeverityGrade g) {
  switch (g) {
    case SeverityGrade::Negative: return "negative";
    case SeverityGrade::Scanty: return "scanty";
    case SeverityGrade::OnePlus: return "1+";
    case SeverityGrade::TwoPlus: return "2+";
    case SeverityGrade::ThreePlus: return "3+";
  }
  throw Error("unknown severity grade");
}

SeverityGrade severity_from_string(const std::string& s) {
  if (s == "negative") return SeverityGrade::Negative;
  if (s == "scanty") return SeverityGrade::Scanty;
  if (s == "1+") return SeverityGrade::OnePlus;
  if (s == "2+") return SeverityGrade::TwoPlus;
  if (s == "3+") return SeverityGrade::ThreePlus;
  throw Error("unknown severity grade: " + s);
}

SmearReport grade_smear(std::string smear_id, const std::vector<std::size_t>& per_fov_counts,
                        std::size_t min_fields) {
  if (per_fov_counts.empty()) throw Error("grade_smear: at least one FOV count required");

  SmearReport report;
  report.smear_id = std::move(smear_id);
  report.fields_examined = per_fov_counts.size();
  report.per_fov_counts = per_fov_counts;
  report.total_afb = std::accumulate(per_fov_counts.begin(), per_fov_counts.end(), std::size_t{0});

  const std::size_t n = report.fields_examined;
  const std::size_t total = report.total_afb;
  const double avg = static_cast<double>(total) / static_cast<double>(n);

  if (n >= 20 && avg > 10.0) {
    report.grade = SeverityGrade::ThreePlus;
  } else if (n >= 50 && avg >= 1.0 && avg <= 10.0) {
    report.grade = SeverityGrade::TwoPlus;
  } else if (total >= 10) {
    report.grade = SeverityGrade::OnePlus;
  } else if (total >= 1) {
    report.grade = SeverityGrade::Scanty;
  } else {
    report.grade = SeverityGrade::Negative;
  }

  report.provisional = report.grade == SeverityGrade::Negative && n < min_fields;
  return report;
}

namespace {

// 3x5 digit glyphs, row-major bits (MSB = leftmost column).
constexpr std::uint8_t kDigitRows[10][5] = {
    {0b111, 0b101, 0b101, 0b101, 0b111},  // 0
    {0b010, 0b110, 0b010, 0b010, 0b111},  // 1
    {0b111, 0b001, 0b111, 0b100, 0b111},  // 2
    {0b111, 0b001, 0b111, 0b001, 0b111},  // 3
    {0b101, 0b101, 0b111, 0b001, 0b001},  // 4
    {0b111, 0b100, 0b111, 0b001, 0b111},  // 5
    {0b111, 0b100, 0b111, 0b101, 0b111},  // 6
    {0b111, 0b001, 0b010, 0b010, 0b010},  // 7
    {0b111, 0b101, 0b111, 0b101, 0b111},  // 8
    {0b111, 0b101, 0b111, 0b001, 0b111},  // 9
};

void put_pixel(RgbImage& img, int x, int y, const std::uint8_t color[3]) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::uint8_t* p = img.at(x, y);
  p[0] = color[0];
  p[1] = color[1];
  p[2] = color[2];
}

void draw_frame(RgbImage& img, const BoundingBox& bbox, const std::uint8_t color[3]) {
  for (int y = bbox.y_min; y <= bbox.y_max; ++y) {
    for (int x = bbox.x_min; x <= bbox.x_max; ++x) {
      const bool on_frame = (x - bbox.x_min < 2) || (bbox.x_max - x < 2) ||
                            (y - bbox.y_min < 2) || (bbox.y_max - y < 2);
      if (on_frame) put_pixel(img, x, y, color);
    }
  }
}

void draw_count_label(RgbImage& img, std::size_t count, const std::uint8_t color[3]) {
  const std::string text = std::to_string(count);
  const int scale = 2;
  int cursor_x = 2;
  const int cursor_y = 2;
  for (const char ch : text) {
    const auto& glyph = kDigitRows[ch - '0'];
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 3; ++col) {
        if (!(glyph[row] & (0b100 >> col))) continue;
        for (int sy = 0; sy < scale; ++sy) {
          for (int sx = 0; sx < scale; ++sx) {
            put_pixel(img, cursor_x + col * scale + sx, cursor_y + row * scale + sy, color);
          }
        }
      }
    }
    cursor_x += 4 * scale;
  }
}

}  // namespace

RgbImage render_overlay(const RgbImage& img, const FovReport& report,
                        const OverlayOptions& options) {
  RgbImage out = img;
  for (const Detection& det : report.detections) {
    if (det.verdict == Verdict::Bacillus) {
      draw_frame(out, det.component.bbox, options.bacillus_color);
    } else if (options.draw_debris) {
      draw_frame(out, det.component.bbox, options.debris_color);
    }
  }
  draw_count_label(out, report.bacilli_count, options.bacillus_color);
  return out;
}

namespace {

ordered_json descriptors_to_json(const ShapeDescriptors& d) {
  return ordered_json{{"area", d.area},
                      {"perimeter", d.perimeter},
                      {"circularity", d.circularity},
                      {"roughness", d.roughness},
                      {"major_axis_length", d.major_axis_length},
                      {"minor_axis_length", d.minor_axis_length},
                      {"eccentricity", d.eccentricity},
                      {"convex_hull_perimeter", d.convex_hull_perimeter}};
}

ShapeDescriptors descriptors_from_json(const ordered_json& j) {
  ShapeDescriptors d;
  d.area = j.at("area").get<std::size_t>();
  d.perimeter = j.at("perimeter").get<double>();
  d.circularity = j.at("circularity").get<double>();
  d.roughness = j.at("roughness").get<double>();
  d.major_axis_length = j.at("major_axis_length").get<double>();
  d.minor_axis_length = j.at("minor_axis_length").get<double>();
  d.eccentricity = j.at("eccentricity").get<double>();
  d.convex_hull_perimeter = j.at("convex_hull_perimeter").get<double>();
  return d;
}

}  // namespace

std::string fov_report_to_json(const FovReport& report) {
  ordered_json detections = ordered_json::array();
  for (const Detection& det : report.detections) {
    detections.push_back(ordered_json{
        {"label", det.component.label},
        {"bbox", {det.component.bbox.x_min, det.component.bbox.y_min, det.component.bbox.x_max,
                  det.component.bbox.y_max}},
        {"centroid", {det.component.centroid_x, det.component.centroid_y}},
        {"descriptors", descriptors_to_json(det.descriptors)},
        {"verdict", to_string(det.verdict)},
        {"rejected_by", det.rejected_by},
    });
  }
  const ordered_json doc{{"image_id", report.image_id},
                         {"bacilli_count", report.bacilli_count},
                         {"detections", detections},
                         {"parameters_digest", report.parameters_digest}};
  return doc.dump(2) + "\n";
}

FovReport fov_report_from_json(const std::string& text) {
  FovReport report;
  try {
    const auto doc = ordered_json::parse(text);
    report.image_id = doc.at("image_id").get<std::string>();
    report.bacilli_count = doc.at("bacilli_count").get<std::size_t>();
    report.parameters_digest = doc.at("parameters_digest").get<std::string>();
    for (const auto& dj : doc.at("detections")) {
      Detection det;
      det.component.label = dj.at("label").get<int>();
      const auto& bbox = dj.at("bbox");
      det.component.bbox = {bbox.at(0).get<int>(), bbox.at(1).get<int>(), bbox.at(2).get<int>(),
                            bbox.at(3).get<int>()};
      det.component.centroid_x = dj.at("centroid").at(0).get<double>();
      det.component.centroid_y = dj.at("centroid").at(1).get<double>();
      det.descriptors = descriptors_from_json(dj.at("descriptors"));
      det.verdict = dj.at("verdict").get<std::string>() == "bacillus" ? Verdict::Bacillus
                                                                      : Verdict::Debris;
      det.rejected_by = dj.at("rejected_by").get<std::vector<std::string>>();
      report.detections.push_back(std::move(det));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("FOV report JSON: ") + e.what());
  }
  return report;
}

std::string smear_report_to_json(const SmearReport& report) {
  const ordered_json doc{{"smear_id", report.smear_id},
                         {"fields_examined", report.fields_examined},
                         {"per_fov_counts", report.per_fov_counts},
                         {"total_afb", report.total_afb},
                         {"grade", to_string(report.grade)},
                         {"provisional", report.provisional}};
  return doc.dump(2) + "\n";
}

std::string serialize_record(const ClinicalRecord& record) {
  const ordered_json doc{{"patient_id", record.patient_id},
                         {"smear_id", record.smear_id},
                         {"grade", to_string(record.grade)},
                         {"timestamp", record.timestamp_utc},
                         {"pipeline_version", record.pipeline_version}};
  return doc.dump();  // single line, no trailing newline
}

ClinicalRecord parse_record(const std::string& line) {
  try {
    const auto doc = ordered_json::parse(line);
    ClinicalRecord record;
    record.patient_id = doc.at("patient_id").get<std::string>();
    record.smear_id = doc.at("smear_id").get<std::string>();
    record.grade = severity_from_string(doc.at("grade").get<std::string>());
    record.timestamp_utc = doc.at("timestamp").get<std::string>();
    record.pipeline_version = doc.at("pipeline_version").get<std::string>();
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("clinical record line: ") + e.what());
  }
}

void append_record(const std::filesystem::path& store_path, const ClinicalRecord& record) {
  const std::string line = serialize_record(record) + "\n";

  const int fd = ::open(store_path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) {
    throw StoreUnavailable("record store " + store_path.string() + ": " + std::strerror(errno));
  }
  if (::flock(fd, LOCK_EX) != 0) {
    const int err = errno;
    ::close(fd);
    throw StoreUnavailable("record store lock failed: " + std::string(std::strerror(err)));
  }

  const char* data = line.data();
  std::size_t remaining = line.size();
  while (remaining > 0) {
    const ssize_t written = ::write(fd, data, remaining);
    if (written < 0) {
      const int err = errno;
      ::flock(fd, LOCK_UN);
      ::close(fd);
      throw StoreUnavailable("record store write failed: " + std::string(std::strerror(err)));
    }
    data += written;
    remaining -= static_cast<std::size_t>(written);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::flock(fd, LOCK_UN);
    ::close(fd);
    throw StoreUnavailable("record store fsync failed: " + std::string(std::strerror(err)));
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
}

std::vector<ClinicalRecord> read_records(const std::filesystem::path& store_path) {
  std::ifstream in(store_path);
  if (!in) throw StoreUnavailable("cannot open record store " + store_path.string());
  std::vector<ClinicalRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(parse_record(line));
  }
  return records;
}

}  // namespace afb
