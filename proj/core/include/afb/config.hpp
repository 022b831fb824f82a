#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "afb/features.hpp"
#include "afb/synthgen.hpp"
#include "afb/threshold.hpp"

namespace afb {

// Every pipeline tunable, with the shipped calibrated defaults. Loaded from
// a flat, sectioned key-value file; unknown keys and out-of-range values are
// rejected with line numbers.
struct PipelineConfig {
  SauvolaParams sauvola;
  int sauvola_stride = 1;
  IterativeThresholdParams coarse;
  MaskMerge merge = MaskMerge::And;
  std::size_t morphology_min_area = 5;
  ClassifierGates gates;
  std::size_t grading_min_fields = 100;
  GeneratorParams synth;
  std::string io_input_dir;
  std::string io_output_dir;
  std::string records_path;
};

PipelineConfig parse_config(const std::string& text, const std::string& source_name);
PipelineConfig load_config(const std::filesystem::path& path);

// Canonical key = value rendering of the detection-affecting parameters
// (sauvola.*, coarse.*, merge, morphology.min_area, gates.*). IO paths,
// grading and generator settings do not alter per-FOV detection output and
// are excluded so the digest changes iff an effective parameter changes.
std::string canonical_detection_parameters(const PipelineConfig& config);

// FNV-1a 64-bit hex digest of canonical_detection_parameters.
std::string parameters_digest(const PipelineConfig& config);

// Renders a "[gates]" config fragment, the output format of calibrate.
std::string gates_fragment(const ClassifierGates& gates);

// Full config file mirroring `config`, suitable for checking into a repo.
std::string render_config(const PipelineConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace afb
