#include "cdsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cdsim/errors.hpp"

namespace cdsim {

std::vector<double> SimulationConfig::detuning_grid() const {
  std::vector<double> grid;
  if (detuning_step <= 0.0 || detuning_stop <= detuning_start) {
    grid.push_back(detuning_start);
    return grid;
  }
  const long long count =
      static_cast<long long>(std::floor((detuning_stop - detuning_start) / detuning_step +
                                        1e-9)) +
      1;
  grid.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) grid.push_back(detuning_start + i * detuning_step);
  return grid;
}

void SimulationConfig::validate() const {
  if (!(density > 0.0)) throw ConfigError("density must be > 0");
  if (exclusion_radius < 0.0) throw ConfigError("exclusion_radius must be >= 0");
  if (polarization < -1 || polarization > 1)
    throw ConfigError("polarization must be -1, 0 or +1");
  if (detuning_stop < detuning_start)
    throw ConfigError("detuning_stop must be >= detuning_start");
  if (detuning_stop > detuning_start && !(detuning_step > 0.0))
    throw ConfigError("detuning_step must be > 0 for a multi-point grid");
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");

  binning.validate();
  const double extent = shape.axial_extent();
  if (binning.z_max != extent)
    throw ConfigError("binning z range must equal the cloud's axial extent");
  if (binning.averaging_radius > shape.transverse_radius())
    throw ConfigError("averaging_radius must not exceed the cloud radius");
  if (!(window.z_min >= 0.0) || !(window.z_min < window.z_max) ||
      !(window.z_max <= extent))
    throw ConfigError("fit window must satisfy 0 <= window_min < window_max <= extent");
}

namespace {

struct RawConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    auto [it, inserted] = raw.sections[section].emplace(key, value);
    (void)it;
    if (!inserted)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return raw;
}

class ConfigReader {
 public:
  explicit ConfigReader(RawConfig raw) : raw_(std::move(raw)) {}

  bool has(const std::string& section, const std::string& key) {
    auto sec = raw_.sections.find(section);
    return sec != raw_.sections.end() && sec->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) {
    mark_used(section, key);
    return raw_.sections.at(section).at(key);
  }

  double get_double(const std::string& section, const std::string& key) {
    const std::string v = get_string(section, key);
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("key '" + section + "." + key + "': not a number: '" + v + "'");
    }
  }

  long long get_int(const std::string& section, const std::string& key) {
    const std::string v = get_string(section, key);
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("key '" + section + "." + key + "': not an integer: '" + v + "'");
    }
  }

  bool get_bool(const std::string& section, const std::string& key) {
    const std::string v = get_string(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + section + "." + key + "': not a boolean: '" + v + "'");
  }

  // Strict schema: every present key must have been consumed.
  void reject_unknown() const {
    for (const auto& [section, kv] : raw_.sections)
      for (const auto& [key, value] : kv)
        if (!used_.count(section + "." + key))
          throw ConfigError("unknown config key '" + section + "." + key + "'");
  }

 private:
  void mark_used(const std::string& section, const std::string& key) {
    if (!has(section, key))
      throw ConfigError("missing required config key '" + section + "." + key + "'");
    used_.insert(section + "." + key);
  }

  RawConfig raw_;
  std::set<std::string> used_;
};

}  // namespace

SimulationConfig parse_config_text(const std::string& text) {
  ConfigReader reader(tokenize(text));
  SimulationConfig cfg;

  const std::string shape_name = reader.get_string("cloud", "shape");
  const double radius = reader.get_double("cloud", "radius");
  if (shape_name == "cylinder") {
    cfg.shape = CloudShape::cylinder(reader.get_double("cloud", "length"), radius);
  } else if (shape_name == "sphere") {
    cfg.shape = CloudShape::sphere(radius);
  } else {
    throw ConfigError("cloud.shape must be 'cylinder' or 'sphere'");
  }
  cfg.density = reader.get_double("cloud", "density");
  if (reader.has("cloud", "exclusion_radius"))
    cfg.exclusion_radius = reader.get_double("cloud", "exclusion_radius");

  if (reader.has("drive", "polarization"))
    cfg.polarization = static_cast<int>(reader.get_int("drive", "polarization"));
  cfg.detuning_start = reader.get_double("drive", "detuning_start");
  cfg.detuning_stop = reader.has("drive", "detuning_stop")
                          ? reader.get_double("drive", "detuning_stop")
                          : cfg.detuning_start;
  cfg.detuning_step =
      reader.has("drive", "detuning_step") ? reader.get_double("drive", "detuning_step") : 0.0;

  cfg.realizations = reader.get_int("ensemble", "realizations");
  if (reader.has("ensemble", "master_seed"))
    cfg.master_seed = static_cast<std::uint64_t>(reader.get_int("ensemble", "master_seed"));
  if (reader.has("ensemble", "workers"))
    cfg.workers = static_cast<int>(reader.get_int("ensemble", "workers"));

  cfg.binning.z_max = cfg.shape.axial_extent();
  cfg.binning.bin_width =
      reader.has("binning", "bin_width") ? reader.get_double("binning", "bin_width") : 0.25;
  cfg.binning.averaging_radius = reader.has("binning", "averaging_radius")
                                     ? reader.get_double("binning", "averaging_radius")
                                     : 0.5 * cfg.shape.transverse_radius();

  cfg.window.z_min =
      reader.has("fit", "window_min") ? reader.get_double("fit", "window_min") : 2.0;
  cfg.window.z_max = reader.has("fit", "window_max") ? reader.get_double("fit", "window_max")
                                                     : cfg.shape.axial_extent() - 2.0;
  if (reader.has("fit", "weighted")) cfg.weighted_fit = reader.get_bool("fit", "weighted");

  if (reader.has("output", "directory"))
    cfg.output_dir = reader.get_string("output", "directory");

  reader.reject_unknown();
  cfg.validate();
  return cfg;
}

SimulationConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_config_text(const SimulationConfig& config) {
  char buf[1024];
  std::string shape;
  if (config.shape.is_cylinder()) {
    std::snprintf(buf, sizeof buf, "shape=cylinder length=%.17g radius=%.17g",
                  config.shape.as_cylinder().length, config.shape.as_cylinder().radius);
  } else {
    std::snprintf(buf, sizeof buf, "shape=sphere radius=%.17g",
                  config.shape.as_sphere().radius);
  }
  shape = buf;
  std::snprintf(buf, sizeof buf,
                "%s density=%.17g exclusion=%.17g pol=%d grid=%.17g:%.17g:%.17g "
                "realizations=%lld seed=%llu bin=%.17g ravg=%.17g window=%.17g:%.17g "
                "weighted=%d",
                shape.c_str(), config.density, config.exclusion_radius, config.polarization,
                config.detuning_start, config.detuning_stop, config.detuning_step,
                config.realizations,
                static_cast<unsigned long long>(config.master_seed), config.binning.bin_width,
                config.binning.averaging_radius, config.window.z_min, config.window.z_max,
                config.weighted_fit ? 1 : 0);
  return buf;
}

std::string config_hash_hex(const SimulationConfig& config) {
  const std::string text = canonical_config_text(config);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cdsim
