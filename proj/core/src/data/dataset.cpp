#include "tenet/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tenet/data/experts.hpp"
#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/io/binary.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

nlohmann::json DatasetOptions::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (Level l : levels) lv.push_back(to_string(l));
  return {{"K", trajectories_per_task},
          {"M", descriptions_per_level},
          {"levels", lv},
          {"seed", seed},
          {"gate_rollouts", gate_rollouts},
          {"gate_threshold", gate_threshold}};
}

std::size_t TaskData::transition_count() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.transitions.size();
  return n;
}

const TaskData& OfflineDataset::find(std::string_view task_id) const {
  for (const auto& t : tasks) {
    if (t.task.id == task_id) return t;
  }
  throw ConfigError("task '" + std::string(task_id) + "' is not in the dataset");
}

bool OfflineDataset::contains(std::string_view task_id) const {
  return std::any_of(tasks.begin(), tasks.end(), [&](const TaskData& t) { return t.task.id == task_id; });
}

std::vector<TaskSpec> OfflineDataset::task_specs() const {
  std::vector<TaskSpec> out;
  for (const auto& t : tasks) out.push_back(t.task);
  return out;
}

std::string OfflineDataset::hash() const {
  nlohmann::json reg = nlohmann::json::array();
  for (const auto& t : tasks) reg.push_back(to_json(t.task));
  return io::config_hash({{"suite", suite}, {"options", options.to_json()}, {"registry", reg},
                          {"provenance", provenance}});
}

ExpertGateError::ExpertGateError(std::vector<std::string> failing)
    : ConfigError("expert gate failed for tasks: " + join(failing)), failing_(std::move(failing)) {}

OfflineDataset generate_dataset(std::span<const TaskSpec> tasks, const DatasetOptions& options,
                                std::string suite) {
  if (tasks.empty()) throw ConfigError("dataset needs at least one task");
  if (options.trajectories_per_task < 1 || options.descriptions_per_level < 1) {
    throw ConfigError("dataset needs K >= 1 and M >= 1");
  }
  if (options.levels.empty()) throw ConfigError("dataset needs at least one description level");
  for (const auto& t : tasks) {
    validate(t);
    if (t.family != tasks.front().family) throw ConfigError("dataset tasks must share one family");
  }
  const auto gate = expert_gate(tasks, options.gate_rollouts, Rng::derive(options.seed, {0x6a7eULL}),
                                options.gate_threshold);
  if (!gate.passed()) throw ExpertGateError(gate.failing);

  OfflineDataset ds;
  ds.suite = std::move(suite);
  ds.options = options;
  ds.provenance = {{"expert_version", kExpertVersion},
                   {"env_constants", EnvConstants::to_json()},
                   {"expert_gains",
                    {{"reach_kp", ExpertGains::reach_kp},
                     {"reach_kd", ExpertGains::reach_kd},
                     {"vel_kp", ExpertGains::vel_kp},
                     {"osc_omega", ExpertGains::osc_omega},
                     {"osc_pump", ExpertGains::osc_pump},
                     {"osc_gain", ExpertGains::osc_gain}}}};
  for (const auto& task : tasks) {
    TaskData td;
    td.task = task;
    const std::uint64_t tid = io::fnv1a64(task.id);
    const auto policy = expert_policy(task);
    for (int k = 0; k < options.trajectories_per_task; ++k) {
      const auto seed = Rng::derive(options.seed, {tid, 1, static_cast<std::uint64_t>(k)});
      td.trajectories.push_back(rollout(task, seed, policy).trajectory);
    }
    for (Level level : options.levels) {
      auto& out = td.descriptions[level];
      for (int m = 0; m < options.descriptions_per_level; ++m) {
        const auto seed = Rng::derive(options.seed, {tid, 2, static_cast<std::uint64_t>(level),
                                                     static_cast<std::uint64_t>(m)});
        out.push_back(sample_description(task, level, seed));
      }
    }
    ds.tasks.push_back(std::move(td));
  }
  return ds;
}

std::vector<TaskSummary> summarize(const OfflineDataset& dataset) {
  std::vector<TaskSummary> out;
  for (const auto& td : dataset.tasks) {
    double ret = 0.0;
    for (const auto& tr : td.trajectories) ret += tr.episodic_return();
    out.push_back({td.task.id, td.transition_count(), ret / static_cast<double>(td.trajectories.size())});
  }
  return out;
}

TaskSplit split_tasks(std::span<const TaskSpec> tasks, std::optional<double> holdout_fraction,
                      std::uint64_t seed) {
  const std::size_t n = tasks.size();
  std::vector<char> is_test(n, 0);
  if (!holdout_fraction) {
    const bool all_vel = n > 0 && std::all_of(tasks.begin(), tasks.end(), [](const TaskSpec& t) {
      return t.family == Family::vel_track_1d;
    });
    if (!all_vel) throw ConfigError("a holdout fraction is required for this family");
    const auto held = vel_track_heldout_targets();
    for (std::size_t i = 0; i < n; ++i) {
      is_test[i] = std::find(held.begin(), held.end(), tasks[i].params[0]) != held.end() ? 1 : 0;
    }
  } else {
    const double f = *holdout_fraction;
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("holdout fraction must lie in (0, 1)");
    const auto n_test = static_cast<std::size_t>(std::lround(f * static_cast<double>(n)));
    if (n_test < 1 || n_test >= n) {
      throw ConfigError("holdout fraction " + std::to_string(f) + " on " + std::to_string(n) +
                        " tasks leaves a side empty");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(Rng::derive(seed, {0x5b117ULL}));
    rng.shuffle(order);
    for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = 1;
  }
  TaskSplit out;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? out.test : out.train).push_back(tasks[i]);
  if (out.train.empty() || out.test.empty()) throw ConfigError("split leaves a side empty");
  return out;
}

}  // namespace tenet
