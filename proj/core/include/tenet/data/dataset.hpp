#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/envs/descriptions.hpp"
#include "tenet/envs/task.hpp"
#include "tenet/error.hpp"

namespace tenet {

struct DatasetOptions {
  int trajectories_per_task = 20;   // K
  int descriptions_per_level = 10;  // M
  std::vector<Level> levels{Level::L0};
  std::uint64_t seed = 1;
  int gate_rollouts = 50;
  double gate_threshold = 0.95;

  nlohmann::json to_json() const;
};

struct TaskData {
  TaskSpec task;
  std::vector<Trajectory> trajectories;
  std::map<Level, std::vector<std::string>> descriptions;

  std::size_t transition_count() const;
};

// Offline training corpus: K expert trajectories and M descriptions per level
// for every task. Immutable once generated or loaded.
struct OfflineDataset {
  std::string suite;
  DatasetOptions options;
  nlohmann::json provenance;
  std::vector<TaskData> tasks;

  const TaskData& find(std::string_view task_id) const;
  bool contains(std::string_view task_id) const;
  std::vector<TaskSpec> task_specs() const;
  // Hash of everything the dataset is a function of.
  std::string hash() const;
  int state_dim() const { return tasks.front().task.state_dim(); }
  int action_dim() const { return tasks.front().task.action_dim(); }
};

class ExpertGateError : public ConfigError {
 public:
  explicit ExpertGateError(std::vector<std::string> failing);
  const std::vector<std::string>& failing() const { return failing_; }

 private:
  std::vector<std::string> failing_;
};

// Runs the expert gate first and refuses (ExpertGateError) if any task fails it.
OfflineDataset generate_dataset(std::span<const TaskSpec> tasks, const DatasetOptions& options,
                                std::string suite = {});

struct TaskSummary {
  std::string task_id;
  std::size_t transitions = 0;
  double mean_return = 0.0;
  bool operator==(const TaskSummary&) const = default;
};
std::vector<TaskSummary> summarize(const OfflineDataset& dataset);

struct TaskSplit {
  std::vector<TaskSpec> train;
  std::vector<TaskSpec> test;
};

// Seeded disjoint split with round(fraction * n) test tasks. With no fraction,
// VelTrack1D registries use the fixed held-out targets; other families require one.
TaskSplit split_tasks(std::span<const TaskSpec> tasks, std::optional<double> holdout_fraction,
                      std::uint64_t seed);

// Directory layout (version 1):
//   manifest.json            registry, K, M, levels, seeds, provenance, hashes
//   tasks/NNNN.bin           "TNTR" u32 version, u32 state_dim, u32 action_dim,
//                            u32 K, then per trajectory: u64 reset seed,
//                            u32 T, T rows of (s, a, r, s') as little-endian f64
//   tasks/NNNN.<level>.txt   UTF-8 descriptions, one per line
// Refuses to write into a non-empty directory unless force is set.
void save_dataset(const OfflineDataset& dataset, const std::filesystem::path& dir, bool force);
OfflineDataset load_dataset(const std::filesystem::path& dir);

}  // namespace tenet
