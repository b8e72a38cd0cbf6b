#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "tenet/ndiff/param_vec.hpp"

namespace tenet::io {

// A deployed controller on its own: "TNCT", u32 version, u64 header length,
// JSON header {manifest: [{name, in, out, activation}], size, info}, then
// size little-endian f64 values. Loading needs no model code.
struct ControllerFile {
  ndiff::ParamVec params;
  // Provenance: source checkpoint, description, config hash.
  nlohmann::json info = nlohmann::json::object();
};

void save_controller(const ControllerFile& c, const std::filesystem::path& path);
ControllerFile load_controller(const std::filesystem::path& path);

nlohmann::json manifest_to_json(const ndiff::Manifest& m);
ndiff::Manifest manifest_from_json(const nlohmann::json& j);

}  // namespace tenet::io
