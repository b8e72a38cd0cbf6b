#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/model/tenet_model.hpp"
#include "tenet/ndiff/adam.hpp"

namespace tenet {

// Trained (or freshly initialized) learner plus everything needed to resume
// or audit it. meta carries the run config, its hash, the dataset hash, the
// text encoder description and the train/test task ids.
struct Checkpoint {
  TenetModel model;
  nlohmann::json meta = nlohmann::json::object();
  std::int64_t step = 0;
  // One Adam state per model block, present when training can be resumed.
  std::optional<std::vector<ndiff::AdamState>> adam;

  bool operator==(const Checkpoint&) const;
};

// Binary layout (version 1): "TNCK", u32 version, u64 header length, JSON
// header {model, meta, step, blocks: [{name, size}], adam}, then each block as
// size little-endian f64 values, then (if adam) per block u64 step, m, v.
// Written through a temporary file and renamed into place.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tenet
