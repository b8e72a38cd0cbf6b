#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace tenet::io {

// Writes through a sibling temporary file and a rename, creating parent
// directories, so readers never see a half-written file.
void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Throws MissingArtifactError naming `producer` (the command that creates the
// artifact) when the path does not exist, LoadError when it is not JSON.
nlohmann::json read_json(const std::filesystem::path& path, std::string_view producer);

// Throws MissingArtifactError naming `producer` when the path does not exist.
void require_artifact(const std::filesystem::path& path, std::string_view producer);

// Writes <dir>/<stem>.json (with "config_hash" added) and <dir>/<stem>.csv.
void write_report(const std::filesystem::path& dir, const std::string& stem, nlohmann::json json,
                  std::string_view csv, const std::string& config_hash);

// Throws ConfigError when an artifact's recorded config hash is absent or
// differs from the expected one.
void require_config_hash(const nlohmann::json& artifact, const std::string& expected, std::string_view what);

}  // namespace tenet::io
