#include "afb/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace afb {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Shortest decimal rendering that parses back to the same double.
std::string fmt_double(double v) {
  char buf[64];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

class ConfigReader {
 public:
  ConfigReader(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) fail(line_no, "empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected key = value");
      std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(line_no, "empty key");
      if (!section.empty()) key = section + "." + key;
      if (entries_.count(key)) fail(line_no, "duplicate key '" + key + "'");
      entries_[key] = {value, line_no, false};
    }
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    fail(it == entries_.end() ? 0 : it->second.line, "key '" + key + "': " + message);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    char* end = nullptr;
    const double v = std::strtod(it->second.value.c_str(), &end);
    if (end == it->second.value.c_str() || *end != '\0') fail_key(key, "not a number");
    return v;
  }

  long get_int(const std::string& key, long fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    char* end = nullptr;
    const long v = std::strtol(it->second.value.c_str(), &end, 10);
    if (end == it->second.value.c_str() || *end != '\0') fail_key(key, "not an integer");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    if (it->second.value == "true") return true;
    if (it->second.value == "false") return false;
    fail_key(key, "expected true or false");
  }

  ColorRgb get_color(const std::string& key, ColorRgb fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    int r = 0, g = 0, b = 0;
    char tail = 0;
    if (std::sscanf(it->second.value.c_str(), "%d,%d,%d%c", &r, &g, &b, &tail) != 3 ||
        r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
      fail_key(key, "expected r,g,b with components in [0,255]");
    }
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
            static_cast<std::uint8_t>(b)};
  }

  // Typo safety: every key in the file must have been consumed.
  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.consumed) fail(entry.line, "unknown key '" + key + "'");
    }
  }

 private:
  std::string source_;
  std::map<std::string, RawEntry> entries_;
};

void read_gate(ConfigReader& reader, const std::string& name, GateInterval& gate) {
  gate.min = reader.get_double("gates." + name + ".min", gate.min);
  gate.max = reader.get_double("gates." + name + ".max", gate.max);
  if (gate.min > gate.max) reader.fail_key("gates." + name + ".min", "min exceeds max");
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& source_name) {
  ConfigReader reader(text, source_name);
  PipelineConfig config;

  const std::string merge = reader.get_string("merge", "and");
  if (merge == "and") {
    config.merge = MaskMerge::And;
  } else if (merge == "or") {
    config.merge = MaskMerge::Or;
  } else {
    reader.fail_key("merge", "expected 'and' or 'or'");
  }

  config.io_input_dir = reader.get_string("io.input_dir", "");
  config.io_output_dir = reader.get_string("io.output_dir", "");
  config.records_path = reader.get_string("records.path", "");

  config.sauvola.window = static_cast<int>(reader.get_int("sauvola.window", config.sauvola.window));
  config.sauvola.k = reader.get_double("sauvola.k", config.sauvola.k);
  config.sauvola.r_cap = reader.get_double("sauvola.r", config.sauvola.r_cap);
  config.sauvola_stride = static_cast<int>(reader.get_int("sauvola.stride", config.sauvola_stride));
  if (config.sauvola.window < 3 || config.sauvola.window % 2 == 0) {
    reader.fail_key("sauvola.window", "must be odd and >= 3");
  }
  if (config.sauvola.k < 0.2 || config.sauvola.k > 0.5) {
    reader.fail_key("sauvola.k", "must lie in [0.2, 0.5]");
  }
  if (config.sauvola.r_cap <= 0.0) reader.fail_key("sauvola.r", "must be positive");
  if (config.sauvola_stride < 1) reader.fail_key("sauvola.stride", "must be >= 1");

  config.coarse.epsilon = reader.get_double("coarse.epsilon", config.coarse.epsilon);
  config.coarse.max_iterations =
      static_cast<int>(reader.get_int("coarse.max_iterations", config.coarse.max_iterations));
  if (config.coarse.epsilon <= 0.0) reader.fail_key("coarse.epsilon", "must be positive");
  if (config.coarse.max_iterations < 1) reader.fail_key("coarse.max_iterations", "must be >= 1");

  const long min_area = reader.get_int("morphology.min_area", static_cast<long>(config.morphology_min_area));
  if (min_area < 1) reader.fail_key("morphology.min_area", "must be >= 1");
  config.morphology_min_area = static_cast<std::size_t>(min_area);

  read_gate(reader, "area", config.gates.area);
  read_gate(reader, "eccentricity", config.gates.eccentricity);
  read_gate(reader, "circularity", config.gates.circularity);
  read_gate(reader, "roughness", config.gates.roughness);
  read_gate(reader, "major_axis_length", config.gates.major_axis_length);

  const long min_fields = reader.get_int("grading.min_fields", static_cast<long>(config.grading_min_fields));
  if (min_fields < 1) reader.fail_key("grading.min_fields", "must be >= 1");
  config.grading_min_fields = static_cast<std::size_t>(min_fields);

  GeneratorParams& synth = config.synth;
  synth.width = static_cast<int>(reader.get_int("synth.width", synth.width));
  synth.height = static_cast<int>(reader.get_int("synth.height", synth.height));
  synth.n_rods = static_cast<int>(reader.get_int("synth.n_rods", synth.n_rods));
  synth.n_debris = static_cast<int>(reader.get_int("synth.n_debris", synth.n_debris));
  synth.rod_length_min = reader.get_double("synth.rod_length_min", synth.rod_length_min);
  synth.rod_length_max = reader.get_double("synth.rod_length_max", synth.rod_length_max);
  synth.rod_thickness_min = reader.get_double("synth.rod_thickness_min", synth.rod_thickness_min);
  synth.rod_thickness_max = reader.get_double("synth.rod_thickness_max", synth.rod_thickness_max);
  synth.rod_min_aspect = reader.get_double("synth.rod_min_aspect", synth.rod_min_aspect);
  synth.blob_radius_min = reader.get_double("synth.blob_radius_min", synth.blob_radius_min);
  synth.blob_radius_max = reader.get_double("synth.blob_radius_max", synth.blob_radius_max);
  synth.speck_radius_min = reader.get_double("synth.speck_radius_min", synth.speck_radius_min);
  synth.speck_radius_max = reader.get_double("synth.speck_radius_max", synth.speck_radius_max);
  synth.background = reader.get_color("synth.background", synth.background);
  synth.rod_color = reader.get_color("synth.rod_color", synth.rod_color);
  synth.wrong_color = reader.get_color("synth.wrong_color", synth.wrong_color);
  synth.noise_sigma = reader.get_double("synth.noise_sigma", synth.noise_sigma);
  synth.seed = static_cast<std::uint64_t>(reader.get_int("synth.seed", static_cast<long>(synth.seed)));
  synth.allow_touching = reader.get_bool("synth.allow_touching", synth.allow_touching);

  if (synth.width < 1 || synth.height < 1) reader.fail_key("synth.width", "image must be non-empty");
  if (synth.n_rods < 0) reader.fail_key("synth.n_rods", "must be >= 0");
  if (synth.n_debris < 0) reader.fail_key("synth.n_debris", "must be >= 0");
  if (synth.rod_length_min > synth.rod_length_max) {
    reader.fail_key("synth.rod_length_min", "empty range");
  }
  if (synth.rod_thickness_min > synth.rod_thickness_max) {
    reader.fail_key("synth.rod_thickness_min", "empty range");
  }
  if (synth.rod_thickness_min < 1.0) reader.fail_key("synth.rod_thickness_min", "must be >= 1");
  if (synth.rod_length_min < synth.rod_thickness_min) {
    reader.fail_key("synth.rod_length_min", "length must be >= thickness");
  }
  if (synth.rod_min_aspect < 1.0) reader.fail_key("synth.rod_min_aspect", "must be >= 1");
  if (synth.blob_radius_min > synth.blob_radius_max) {
    reader.fail_key("synth.blob_radius_min", "empty range");
  }
  if (synth.speck_radius_min > synth.speck_radius_max) {
    reader.fail_key("synth.speck_radius_min", "empty range");
  }
  if (synth.noise_sigma < 0.0) reader.fail_key("synth.noise_sigma", "must be >= 0");

  reader.reject_unknown();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string canonical_detection_parameters(const PipelineConfig& config) {
  std::ostringstream out;
  out << "coarse.epsilon = " << fmt_double(config.coarse.epsilon) << "\n";
  out << "coarse.max_iterations = " << config.coarse.max_iterations << "\n";
  const auto gate = [&out](const char* name, const GateInterval& g) {
    out << "gates." << name << ".min = " << fmt_double(g.min) << "\n";
    out << "gates." << name << ".max = " << fmt_double(g.max) << "\n";
  };
  gate("area", config.gates.area);
  gate("circularity", config.gates.circularity);
  gate("eccentricity", config.gates.eccentricity);
  gate("major_axis_length", config.gates.major_axis_length);
  gate("roughness", config.gates.roughness);
  out << "merge = " << (config.merge == MaskMerge::And ? "and" : "or") << "\n";
  out << "morphology.min_area = " << config.morphology_min_area << "\n";
  out << "sauvola.k = " << fmt_double(config.sauvola.k) << "\n";
  out << "sauvola.r = " << fmt_double(config.sauvola.r_cap) << "\n";
  out << "sauvola.stride = " << config.sauvola_stride << "\n";
  out << "sauvola.window = " << config.sauvola.window << "\n";
  return out.str();
}

std::string parameters_digest(const PipelineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_detection_parameters(config))));
  return buf;
}

std::string gates_fragment(const ClassifierGates& gates) {
  std::ostringstream out;
  out << "[gates]\n";
  const auto gate = [&out](const char* name, const GateInterval& g) {
    out << name << ".min = " << fmt_double(g.min) << "\n";
    out << name << ".max = " << fmt_double(g.max) << "\n";
  };
  gate("area", gates.area);
  gate("eccentricity", gates.eccentricity);
  gate("circularity", gates.circularity);
  gate("roughness", gates.roughness);
  gate("major_axis_length", gates.major_axis_length);
  return out.str();
}

std::string render_config(const PipelineConfig& config) {
  std::ostringstream out;
  out << "# afb-screen pipeline configuration\n\n";
  out << "merge = " << (config.merge == MaskMerge::And ? "and" : "or") << "\n\n";
  if (!config.io_input_dir.empty() || !config.io_output_dir.empty()) {
    out << "[io]\n";
    if (!config.io_input_dir.empty()) out << "input_dir = " << config.io_input_dir << "\n";
    if (!config.io_output_dir.empty()) out << "output_dir = " << config.io_output_dir << "\n";
    out << "\n";
  }
  if (!config.records_path.empty()) {
    out << "[records]\npath = " << config.records_path << "\n\n";
  }
  out << "[sauvola]\n";
  out << "window = " << config.sauvola.window << "\n";
  out << "k = " << fmt_double(config.sauvola.k) << "\n";
  out << "r = " << fmt_double(config.sauvola.r_cap) << "\n";
  out << "stride = " << config.sauvola_stride << "\n\n";
  out << "[coarse]\n";
  out << "epsilon = " << fmt_double(config.coarse.epsilon) << "\n";
  out << "max_iterations = " << config.coarse.max_iterations << "\n\n";
  out << "[morphology]\n";
  out << "min_area = " << config.morphology_min_area << "\n\n";
  out << "[grading]\n";
  out << "min_fields = " << config.grading_min_fields << "\n\n";
  out << gates_fragment(config.gates) << "\n";
  const GeneratorParams& synth = config.synth;
  out << "[synth]\n";
  out << "width = " << synth.width << "\n";
  out << "height = " << synth.height << "\n";
  out << "n_rods = " << synth.n_rods << "\n";
  out << "n_debris = " << synth.n_debris << "\n";
  out << "rod_length_min = " << fmt_double(synth.rod_length_min) << "\n";
  out << "rod_length_max = " << fmt_double(synth.rod_length_max) << "\n";
  out << "rod_thickness_min = " << fmt_double(synth.rod_thickness_min) << "\n";
  out << "rod_thickness_max = " << fmt_double(synth.rod_thickness_max) << "\n";
  out << "rod_min_aspect = " << fmt_double(synth.rod_min_aspect) << "\n";
  out << "blob_radius_min = " << fmt_double(synth.blob_radius_min) << "\n";
  out << "blob_radius_max = " << fmt_double(synth.blob_radius_max) << "\n";
  out << "speck_radius_min = " << fmt_double(synth.speck_radius_min) << "\n";
  out << "speck_radius_max = " << fmt_double(synth.speck_radius_max) << "\n";
  out << "background = " << int(synth.background.r) << "," << int(synth.background.g) << ","
      << int(synth.background.b) << "\n";
  out << "rod_color = " << int(synth.rod_color.r) << "," << int(synth.rod_color.g) << ","
      << int(synth.rod_color.b) << "\n";
  out << "wrong_color = " << int(synth.wrong_color.r) << "," << int(synth.wrong_color.g) << ","
      << int(synth.wrong_color.b) << "\n";
  out << "noise_sigma = " << fmt_double(synth.noise_sigma) << "\n";
  out << "seed = " << synth.seed << "\n";
  out << "allow_touching = " << (synth.allow_touching ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace afb
