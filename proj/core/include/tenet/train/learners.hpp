#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/data/dataset.hpp"
#include "tenet/model/losses.hpp"
#include "tenet/ndiff/adam.hpp"
#include "tenet/text/embedding.hpp"

namespace tenet {

struct TrainConfig {
  std::int64_t steps = 20000;
  double lr = 3e-4;
  // Tasks per step; 0 means min(32, number of train tasks).
  int batch_tasks = 0;
  // Transitions drawn (with replacement) per task per step for the BC term.
  int bc_transitions = 64;
  int log_every = 100;
  std::uint64_t seed = 0;
  // Description levels the text side samples from.
  std::vector<Level> levels{Level::L0};
  ndiff::AdamConfig adam{};

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

int effective_batch_tasks(const TrainConfig& config, std::size_t n_train);

// Text embeddings of every stored description, computed once.
class TextBank {
 public:
  TextBank(const OfflineDataset& dataset, std::span<const Level> levels, const TextEncoder& encoder);
  // Embeddings of task i (dataset order), all requested levels concatenated.
  const std::vector<ndiff::Vec>& of(std::size_t task_index) const { return embeddings_[task_index]; }

 private:
  std::vector<std::vector<ndiff::Vec>> embeddings_;
};

// Deterministic batch assembly: the batch of step s is a pure function of
// (seed, s), with separate streams for task choice, BC transitions, the
// grounding/prompt trajectory and the description, so that learners that
// ignore a stream still see identical draws from the others.
class BatchSampler {
 public:
  BatchSampler(const OfflineDataset& dataset, std::span<const std::string> train_ids, const TextBank& bank,
               const TrainConfig& config);

  TrainBatch sample(std::int64_t step) const;
  std::size_t task_count() const { return tasks_.size(); }

 private:
  struct TaskCache {
    std::string id;
    std::size_t dataset_index = 0;
    ndiff::Mat states;
    ndiff::Mat actions;
    std::vector<ndiff::Mat> features;
  };
  std::vector<TaskCache> tasks_;
  const TextBank& bank_;
  TrainConfig config_;
  int batch_ = 0;
};

}  // namespace tenet
