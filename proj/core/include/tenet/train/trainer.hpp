#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tenet/data/dataset.hpp"
#include "tenet/model/checkpoint.hpp"
#include "tenet/model/losses.hpp"
#include "tenet/text/embedding.hpp"
#include "tenet/train/learners.hpp"

namespace tenet {

struct LossRecord {
  std::int64_t step = 0;
  LossBreakdown loss;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<LossRecord> log;
};

// Non-finite loss or gradient. Carries the parameters from before the
// offending step.
class TrainingAborted : public NumericError {
 public:
  TrainingAborted(std::string what, Checkpoint last_good, std::int64_t step)
      : NumericError(std::move(what)), last_good_(std::move(last_good)), step_(step) {}
  const Checkpoint& last_good() const { return last_good_; }
  std::int64_t step() const { return step_; }

 private:
  Checkpoint last_good_;
  std::int64_t step_;
};

struct TrainRequest {
  ModelConfig model;
  TrainConfig train;
  std::vector<std::string> train_ids;
  // Extra fields merged into the checkpoint's meta.
  nlohmann::json meta = nlohmann::json::object();
  // Continue from this checkpoint (its step and Adam state) up to train.steps.
  std::optional<Checkpoint> resume;
  std::function<void(const LossRecord&)> on_log;
};

// Offline training: Adam on the total loss over seeded task batches drawn from
// the dataset alone. Initialization uses train.seed.
TrainResult train(const TrainRequest& request, const OfflineDataset& dataset, const TextEncoder& encoder);

// Loss curve as CSV: step,total,bc,align,text_traj,text_text.
std::string loss_log_csv(std::span<const LossRecord> log);

}  // namespace tenet
