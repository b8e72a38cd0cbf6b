#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/envs/task.hpp"
#include "tenet/train/policy_source.hpp"

namespace tenet {

inline constexpr int kEvalReportVersion = 1;

struct EvalTask {
  TaskSpec task;
  std::string split;  // train, test, ood, ...
};

std::vector<EvalTask> label_tasks(std::span<const TaskSpec> tasks, const std::string& split);

struct EvalOptions {
  int n_rollouts = 50;
  std::vector<std::uint64_t> seeds{0};
};

// One task under one seed.
struct EvalRow {
  std::string task_id;
  std::string split;
  std::uint64_t seed = 0;
  int rollouts = 0;
  int successes = 0;
  int failed = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double std_return = 0.0;
  bool operator==(const EvalRow&) const = default;
};

// Per task or per split, pooled over seeds.
struct EvalAggregate {
  std::string name;
  std::string split;
  int tasks = 0;
  int rollouts = 0;
  int failed = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double std_return = 0.0;
  bool operator==(const EvalAggregate&) const = default;
};

struct EvalReport {
  std::string policy;
  std::string config_hash;
  int n_rollouts = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalRow> rows;
  std::vector<EvalAggregate> per_task;
  std::vector<EvalAggregate> per_split;

  int failed_rollouts() const;
  // Pooled success over a split; throws ConfigError if the split is absent.
  double success(const std::string& split) const;
  nlohmann::json to_json() const;
  // One row per task per seed.
  std::string to_csv() const;
  bool operator==(const EvalReport&) const = default;
};

// Runs n_rollouts seeded episodes per task and seed. Reset seeds are derived
// from (seed, task id, rollout index), so reports are reproducible. Rollouts
// whose policy emits a non-finite action count as failures and are flagged.
EvalReport evaluate(const PolicySource& source, std::span<const EvalTask> tasks, const EvalOptions& options,
                    std::string config_hash = {});

}  // namespace tenet
