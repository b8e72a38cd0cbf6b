#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/data/dataset.hpp"
#include "tenet/model/checkpoint.hpp"
#include "tenet/text/embedding.hpp"
#include "tenet/train/evaluate.hpp"
#include "tenet/train/learners.hpp"
#include "tenet/train/policy_source.hpp"
#include "tenet/train/trainer.hpp"

namespace tenet {

using ProgressFn = std::function<void(const std::string&)>;

// Trains one learner on `train_tasks` of the dataset with train.seed = seed.
// State/action dims come from the dataset and d_z from the encoder.
TrainResult fit(ModelConfig model, TrainConfig train, std::uint64_t seed, const OfflineDataset& dataset,
                std::span<const TaskSpec> train_tasks, const TextEncoder& encoder,
                nlohmann::json meta = nlohmann::json::object());

// ---- velocity alignment -------------------------------------------------

struct VelocityPoint {
  double instructed = 0.0;
  double achieved_mean = 0.0;
  double achieved_std = 0.0;
  int rollouts = 0;
  // Beyond the fastest speed the dynamics can sustain.
  bool out_of_range = false;
  bool operator==(const VelocityPoint&) const = default;
};

// Instructs the source with the canonical command for each target and records
// the mean speed over the final window of each rollout.
std::vector<VelocityPoint> velocity_alignment(const PolicySource& source, std::span<const double> targets,
                                              int n_rollouts, std::uint64_t seed = 0);

// Held-out targets followed by the out-of-range command.
std::vector<double> velocity_study_targets();

std::string velocity_csv(std::span<const VelocityPoint> curve);
nlohmann::json velocity_json(std::span<const VelocityPoint> curve);

// ---- task scaling ---------------------------------------------------------

struct ScalingOptions {
  std::vector<int> sizes{25, 50, 100, 200};
  double holdout_fraction = 0.1;
  std::uint64_t registry_seed = 1;
  std::uint64_t split_seed = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int n_rollouts = 50;
  ModelConfig model;
  TrainConfig train;
  DatasetOptions dataset;
};

struct ScalingRow {
  int registry_size = 0;
  int train_tasks = 0;
  int test_tasks = 0;
  std::vector<double> per_seed;
  double mean = 0.0;
  double std = 0.0;
  bool operator==(const ScalingRow&) const = default;
};

// Throws ConfigError unless sizes are strictly ascending (so no duplicates)
// and each size leaves at least one task on both sides of the split.
void validate_scaling_sizes(std::span<const int> sizes, double holdout_fraction);

// One PointGoal2D registry per size, 10% held out; one model per seed;
// held-out success per seed.
std::vector<ScalingRow> task_scaling(const ScalingOptions& options, const TextEncoder& encoder,
                                     const ProgressFn& progress = {});

std::string scaling_csv(std::span<const ScalingRow> rows);
nlohmann::json scaling_json(std::span<const ScalingRow> rows);

// ---- paraphrase robustness ------------------------------------------------

struct ParaphraseRow {
  std::string provider;
  Level level = Level::L0;
  double success = 0.0;
  int rollouts = 0;
  bool operator==(const ParaphraseRow&) const = default;
};

// Re-instantiates every task's policy from freshly sampled level-k
// descriptions (one per task and seed) and evaluates it.
std::vector<ParaphraseRow> paraphrase_eval(const TenetModel& model, const TextEncoder& encoder,
                                           const std::string& provider, std::span<const TaskSpec> tasks,
                                           std::span<const Level> levels, const EvalOptions& eval);

// Every description paraphrase_eval would embed, so that an embedding table
// can be precomputed for exactly this corpus.
std::vector<std::string> paraphrase_corpus(std::span<const TaskSpec> tasks, std::span<const Level> levels,
                                           std::span<const std::uint64_t> seeds);

// Rows that break success(L0) >= success(L1) >= success(L2) by more than
// `band`, per provider, as human-readable notes.
std::vector<std::string> paraphrase_order_violations(std::span<const ParaphraseRow> rows, double band);

std::string paraphrase_csv(std::span<const ParaphraseRow> rows);
nlohmann::json paraphrase_json(std::span<const ParaphraseRow> rows);

// ---- learner comparison ---------------------------------------------------

struct LearnerSpec {
  std::string name;
  ModelKind kind = ModelKind::tenet;
  Variant variant = Variant::contrastive;
  // Per-learner override of TrainConfig::bc_transitions.
  std::optional<int> bc_transitions;
};

// TeNet (direct, contrastive), traj-hn, prompt-concat and bc-shared. The two
// wide budget-matched MLPs draw 8 BC transitions per task per step.
std::vector<LearnerSpec> default_learners();

struct LearnerResult {
  std::string learner;
  std::uint64_t seed = 0;
  std::size_t trainable_params = 0;
  std::size_t controller_params = 0;
  EvalReport report;
  std::optional<Checkpoint> checkpoint;
};

struct BaselineOptions {
  std::vector<LearnerSpec> learners = default_learners();
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int n_rollouts = 50;
  ModelConfig model;
  TrainConfig train;
  // Also evaluate traj-hn with the prompt of a different task.
  bool wrong_prompt_probe = true;
  bool keep_checkpoints = false;
};

// Trains every learner per seed on all dataset tasks and evaluates each on
// the train tasks. TeNet acts from canonical text; prompt learners get a
// fresh expert rollout of the task as prompt. The wrong-prompt probe adds a
// "traj-hn/wrong-prompt" result per traj-hn model.
std::vector<LearnerResult> compare_learners(const BaselineOptions& options, const OfflineDataset& dataset,
                                            const TextEncoder& encoder, const ProgressFn& progress = {});

// Mean success over seeds for one learner name; throws ConfigError if absent.
double mean_success(std::span<const LearnerResult> results, const std::string& learner);
// Mean success over seeds of one learner on one task.
double mean_task_success(std::span<const LearnerResult> results, const std::string& learner,
                         const std::string& task_id);

std::string learners_csv(std::span<const LearnerResult> results);
nlohmann::json learners_json(std::span<const LearnerResult> results);

}  // namespace tenet
