#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "afb/features.hpp"
#include "afb/image.hpp"

namespace afb {

// WHO-style smear severity classes, ordered by increasing severity.
enum class SeverityGrade { Negative, Scanty, OnePlus, TwoPlus, ThreePlus };

// String forms used in reports: "negative", "scanty", "1+", "2+", "3+".
std::string to_string(SeverityGrade g);
SeverityGrade severity_from_string(const std::string& s);

struct FovReport {
  std::string image_id;
  std::size_t bacilli_count = 0;
  std::vector<Detection> detections;
  std::string parameters_digest;
};

struct SmearReport {
  std::string smear_id;
  std::size_t fields_examined = 0;
  std::vector<std::size_t> per_fov_counts;
  std::size_t total_afb = 0;
  SeverityGrade grade = SeverityGrade::Negative;
  // Negative grades from fewer than min_fields FOVs are not conclusive.
  bool provisional = false;
};

struct ClinicalRecord {
  std::string patient_id;
  std::string smear_id;
  SeverityGrade grade = SeverityGrade::Negative;
  std::string timestamp_utc;  // ISO 8601, e.g. 2024-05-01T12:00:00Z
  std::string pipeline_version;

  bool operator==(const ClinicalRecord&) const = default;
};

// Severity from per-FOV counts, highest severity first:
//   3+      n >= 20 and avg > 10
//   2+      n >= 50 and 1 <= avg <= 10
//   1+      total >= 10   (Table band 10-99 per 100 fields; larger totals
//                          with no 2+/3+ row applicable stay 1+)
//   scanty  1 <= total <= 9
//   negative otherwise
// min_fields only affects the provisional flag on Negative results.
SmearReport grade_smear(std::string smear_id, const std::vector<std::size_t>& per_fov_counts,
                        std::size_t min_fields = 100);

struct OverlayOptions {
  bool draw_debris = false;
  // RGB frame colors.
  std::uint8_t bacillus_color[3] = {0, 200, 0};
  std::uint8_t debris_color[3] = {128, 128, 128};
};

// Copy of img with a 2-pixel frame on every Bacillus bbox (and optionally on
// Debris bboxes) and the bacilli count rendered in the top-left corner.
RgbImage render_overlay(const RgbImage& img, const FovReport& report,
                        const OverlayOptions& options = {});

// JSON document forms of the report types (External Interfaces).
std::string fov_report_to_json(const FovReport& report);
std::string smear_report_to_json(const SmearReport& report);
FovReport fov_report_from_json(const std::string& text);

// One JSON object per line. Serialization round-trips through parse_record.
std::string serialize_record(const ClinicalRecord& record);
ClinicalRecord parse_record(const std::string& line);

// Appends one line to the record log under an exclusive file lock and
// fsyncs before returning. Throws StoreUnavailable on lock or I/O failure.
void append_record(const std::filesystem::path& store_path, const ClinicalRecord& record);

// Reads every record in the log, in append order.
std::vector<ClinicalRecord> read_records(const std::filesystem::path& store_path);

}  // namespace afb
