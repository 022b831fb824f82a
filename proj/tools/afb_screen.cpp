#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "afb/config.hpp"
#include "afb/image_io.hpp"
#include "afb/pipeline.hpp"
#include "afb/report.hpp"
#include "afb/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStore = 3;

afb::PipelineConfig resolve_config(const std::string& config_path) {
  if (!config_path.empty()) return afb::load_config(config_path);
  if (const char* env = std::getenv("AFB_SCREEN_CONFIG"); env && *env) {
    return afb::load_config(env);
  }
  return afb::PipelineConfig{};  // built-in calibrated defaults
}

std::vector<fs::path> collect_images(const std::vector<std::string>& inputs,
                                     const std::string& fallback_dir) {
  std::vector<std::string> roots = inputs;
  if (roots.empty() && !fallback_dir.empty()) roots.push_back(fallback_dir);

  std::vector<fs::path> images;
  for (const std::string& root : roots) {
    const fs::path p(root);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".ppm") images.push_back(entry.path());
      }
    } else {
      images.push_back(p);
    }
  }
  std::sort(images.begin(), images.end());
  return images;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw afb::Error("cannot write " + path.string());
  out << text;
}

int cmd_detect(const afb::PipelineConfig& config, const std::vector<std::string>& inputs,
               std::string out_dir, bool overlay, int jobs) {
  if (out_dir.empty()) out_dir = config.io_output_dir;
  if (out_dir.empty()) {
    std::cerr << "detect: no output directory (--out or io.output_dir)\n";
    return kExitConfig;
  }
  const auto images = collect_images(inputs, config.io_input_dir);
  if (images.empty()) {
    std::cerr << "detect: no input images\n";
    return kExitConfig;
  }
  const afb::BatchOutcome outcome = afb::run_detect(config, images, out_dir, overlay, jobs);
  for (const auto& failure : outcome.failures) {
    std::cerr << "detect: " << failure.path.string() << ": " << failure.message << "\n";
  }
  std::cout << "detect: " << outcome.processed << "/" << images.size() << " images processed -> "
            << out_dir << "\n";
  return outcome.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_grade(const afb::PipelineConfig& config, const std::string& reports_dir,
              const std::string& smear_id, const std::string& patient_id, std::string records_path,
              const std::string& out_dir) {
  std::vector<fs::path> report_files;
  for (const auto& entry : fs::directory_iterator(reports_dir)) {
    if (entry.is_regular_file() && entry.path().string().ends_with(".report.json")) {
      report_files.push_back(entry.path());
    }
  }
  std::sort(report_files.begin(), report_files.end());
  if (report_files.empty()) {
    std::cerr << "grade: no .report.json files in " << reports_dir << "\n";
    return kExitConfig;
  }

  std::vector<std::size_t> counts;
  for (const fs::path& file : report_files) {
    std::ifstream in(file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    counts.push_back(afb::fov_report_from_json(buffer.str()).bacilli_count);
  }

  const afb::SmearReport report = afb::grade_smear(smear_id, counts, config.grading_min_fields);
  const std::string json = afb::smear_report_to_json(report);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / (smear_id + ".smear.json"), json);
  }
  std::cout << json;

  if (records_path.empty()) records_path = config.records_path;
  if (!records_path.empty()) {
    afb::ClinicalRecord record;
    record.patient_id = patient_id;
    record.smear_id = smear_id;
    record.grade = report.grade;
    record.timestamp_utc = utc_now_iso8601();
    record.pipeline_version = afb::kPipelineVersion;
    afb::append_record(records_path, record);
  }
  return kExitOk;
}

int cmd_synth(afb::PipelineConfig config, const std::string& out_dir, int count,
              std::uint64_t seed) {
  fs::create_directories(out_dir);
  afb::GeneratorParams params = config.synth;
  params.seed = seed;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "fov_%04d", i);
    const auto [img, scene] = afb::generate_scene(params);
    afb::save_png(img, fs::path(out_dir) / (std::string(name) + ".png"));
    write_text(fs::path(out_dir) / (std::string(name) + ".truth.json"),
               afb::scene_to_json(scene));
    params.seed += 1;  // consecutive seeds, each scene reproducible on its own
  }
  std::cout << "synth: wrote " << count << " FOVs to " << out_dir << "\n";
  return kExitOk;
}

int cmd_calibrate(const afb::PipelineConfig& config, std::uint64_t seed,
                  const std::string& out_path) {
  const afb::ClassifierGates gates = afb::run_calibrate(config, seed);
  const std::string fragment = afb::gates_fragment(gates);
  if (!out_path.empty()) {
    write_text(out_path, fragment);
  }
  std::cout << fragment;
  return kExitOk;
}

int cmd_evaluate(const afb::PipelineConfig& config, const std::string& corpus_dir,
                 const std::string& out_path, double tolerance) {
  std::vector<std::pair<afb::RgbImage, afb::SyntheticScene>> corpus;
  std::vector<fs::path> sidecars;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_regular_file() && entry.path().string().ends_with(".truth.json")) {
      sidecars.push_back(entry.path());
    }
  }
  std::sort(sidecars.begin(), sidecars.end());
  if (sidecars.empty()) {
    std::cerr << "evaluate: no .truth.json sidecars in " << corpus_dir << "\n";
    return kExitConfig;
  }
  for (const fs::path& sidecar : sidecars) {
    std::string image_path = sidecar.string();
    image_path.replace(image_path.size() - std::string(".truth.json").size(),
                       std::string(".truth.json").size(), ".png");
    std::ifstream in(sidecar);
    std::stringstream buffer;
    buffer << in.rdbuf();
    corpus.emplace_back(afb::load_image(image_path), afb::scene_from_json(buffer.str()));
  }

  const afb::EvalResult result = afb::evaluate_corpus(config, corpus, tolerance);
  const std::string json = afb::eval_result_to_json(result, afb::parameters_digest(config));
  if (!out_path.empty()) write_text(out_path, json);
  std::cout << json;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch screening of Ziehl-Neelsen stained sputum smear fields of view"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "pipeline configuration file");

  auto* detect = app.add_subcommand("detect", "detect and count bacilli in FOV images");
  std::vector<std::string> detect_inputs;
  std::string detect_out;
  bool detect_overlay = true;
  int detect_jobs = 1;
  detect->add_option("inputs", detect_inputs, "image files or directories");
  detect->add_option("--out", detect_out, "output directory for reports and overlays");
  detect->add_flag("--overlay,!--no-overlay", detect_overlay, "write annotated overlays");
  detect->add_option("--jobs", detect_jobs, "concurrent images")->check(CLI::PositiveNumber);

  auto* grade = app.add_subcommand("grade", "grade smear severity from FOV reports");
  std::string grade_reports, grade_smear_id = "smear", grade_patient = "anonymous";
  std::string grade_records, grade_out;
  grade->add_option("--reports", grade_reports, "directory of .report.json files")->required();
  grade->add_option("--smear-id", grade_smear_id, "smear identifier");
  grade->add_option("--patient-id", grade_patient, "patient identifier for the record log");
  grade->add_option("--records", grade_records, "clinical record log path");
  grade->add_option("--out", grade_out, "directory for the smear report");

  auto* synth = app.add_subcommand("synth", "generate synthetic FOVs with ground truth");
  std::string synth_out;
  int synth_count = 5;
  std::uint64_t synth_seed = 1;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--count", synth_count, "number of FOVs")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "seed of the first FOV");

  auto* calibrate = app.add_subcommand("calibrate", "derive classifier gates from synthetic rods");
  std::string calibrate_out;
  std::uint64_t calibrate_seed = 1;
  calibrate->add_option("--out", calibrate_out, "gates fragment output path");
  calibrate->add_option("--seed", calibrate_seed, "calibration corpus seed");

  auto* evaluate = app.add_subcommand("evaluate", "score detections against synthetic ground truth");
  std::string eval_corpus, eval_out;
  double eval_tolerance = 10.0;
  evaluate->add_option("--corpus", eval_corpus, "directory of .png + .truth.json pairs")->required();
  evaluate->add_option("--out", eval_out, "summary JSON output path");
  evaluate->add_option("--tolerance", eval_tolerance, "centroid match tolerance, px");

  auto* version = app.add_subcommand("version", "print version and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (version->parsed()) {
      std::cout << afb::kPipelineName << " " << afb::kPipelineVersion << "\n";
      return kExitOk;
    }
    const afb::PipelineConfig config = resolve_config(config_path);
    if (detect->parsed()) {
      return cmd_detect(config, detect_inputs, detect_out, detect_overlay, detect_jobs);
    }
    if (grade->parsed()) {
      return cmd_grade(config, grade_reports, grade_smear_id, grade_patient, grade_records,
                       grade_out);
    }
    if (synth->parsed()) return cmd_synth(config, synth_out, synth_count, synth_seed);
    if (calibrate->parsed()) return cmd_calibrate(config, calibrate_seed, calibrate_out);
    if (evaluate->parsed()) return cmd_evaluate(config, eval_corpus, eval_out, eval_tolerance);
  } catch (const afb::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const afb::StoreUnavailable& e) {
    std::cerr << "record store error: " << e.what() << "\n";
    return kExitStore;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}
