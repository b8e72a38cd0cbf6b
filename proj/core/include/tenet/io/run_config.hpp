#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/data/dataset.hpp"
#include "tenet/model/tenet_model.hpp"
#include "tenet/text/embedding.hpp"
#include "tenet/train/learners.hpp"

namespace tenet::io {

struct SplitConfig {
  // Unset: VelTrack1D uses its fixed held-out targets, other families fail.
  std::optional<double> holdout_fraction;
  std::uint64_t seed = 0;
};

struct ProviderConfig {
  std::string kind = "hash";  // hash | table
  int dim = 256;
  std::string table;          // NDJSON path when kind == table
};

struct EvalConfig {
  int rollouts = 50;
  std::vector<std::uint64_t> seeds{0, 1, 2};
};

// One JSON file describes a whole run; every section is optional and every
// unknown key is an error. See docs/run_config.md.
struct RunConfig {
  std::string suite = "switchworld10";
  int task_count = 0;
  std::uint64_t registry_seed = 1;
  SplitConfig split;
  DatasetOptions dataset;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
  ProviderConfig provider;
  std::string output = "runs/default";

  // Fills the family-dependent dimensions (state, action, d_z) and validates.
  void finalize();
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  // Hash of the canonical JSON form; embedded in every artifact.
  std::string hash() const;
  // Hash of the sections a dataset depends on (suite, registry, split, dataset).
  std::string data_hash() const;
  // data_hash plus the model, train and provider sections: what a checkpoint
  // depends on. Evaluation settings and the output path are excluded.
  std::string model_hash() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
// Merges `patch` into `base` key by key (objects recursively), as flags do.
nlohmann::json merge_patch(nlohmann::json base, const nlohmann::json& patch);

std::vector<TaskSpec> registry_of(const RunConfig& c);
TaskSplit split_of(const RunConfig& c, std::span<const TaskSpec> tasks);
std::unique_ptr<TextEncoder> make_encoder(const ProviderConfig& p);

}  // namespace tenet::io
