#include "cdsim/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "cdsim/errors.hpp"

namespace cdsim {

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["mode"] = m.mode;
  j["config_hash"] = m.config_hash;
  j["config_text"] = m.config_text;
  j["version"] = m.version;
  j["status"] = m.status;
  j["realizations_target"] = m.realizations_target;
  j["realizations_completed"] = m.realizations_completed;
  j["resamples_total"] = m.resamples_total;
  j["wall_seconds"] = m.wall_seconds;
  j["detunings"] = m.detunings;
  j["singular_events"] = m.singular_events;
  j["notes"] = m.notes;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write manifest: " + tmp);
    out << j.dump(2) << "\n";
  }
  std::rename(tmp.c_str(), path.c_str());
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path + ": " + e.what());
  }
  RunManifest m;
  m.mode = j.value("mode", "");
  m.config_hash = j.value("config_hash", "");
  m.config_text = j.value("config_text", "");
  m.version = j.value("version", "");
  m.status = j.value("status", "");
  m.realizations_target = j.value("realizations_target", 0LL);
  m.realizations_completed = j.value("realizations_completed", 0LL);
  m.resamples_total = j.value("resamples_total", 0LL);
  m.wall_seconds = j.value("wall_seconds", 0.0);
  m.detunings = j.value("detunings", std::vector<double>{});
  m.singular_events = j.value("singular_events", std::vector<long long>{});
  m.notes = j.value("notes", std::vector<std::string>{});
  return m;
}

}  // namespace cdsim
