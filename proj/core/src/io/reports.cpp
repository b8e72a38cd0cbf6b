#include "tenet/io/reports.hpp"

#include <fstream>

#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"

namespace tenet::io {

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw LoadError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void require_artifact(const std::filesystem::path& path, std::string_view producer) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError(path.string() + " does not exist; create it with `tenet " + std::string(producer) +
                               "`");
  }
}

nlohmann::json read_json(const std::filesystem::path& path, std::string_view producer) {
  require_artifact(path, producer);
  try {
    return nlohmann::json::parse(read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void write_report(const std::filesystem::path& dir, const std::string& stem, nlohmann::json json,
                  std::string_view csv, const std::string& config_hash) {
  json["config_hash"] = config_hash;
  write_json(dir / (stem + ".json"), json);
  write_text(dir / (stem + ".csv"), csv);
}

void require_config_hash(const nlohmann::json& artifact, const std::string& expected, std::string_view what) {
  const auto it = artifact.find("config_hash");
  if (it == artifact.end() || !it->is_string()) {
    throw ConfigError(std::string(what) + " records no config hash");
  }
  if (it->get<std::string>() != expected) {
    throw ConfigError(std::string(what) + " was produced by config " + it->get<std::string>() +
                      ", current config is " + expected);
  }
}

}  // namespace tenet::io
