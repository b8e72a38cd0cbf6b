#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "tenet/data/dataset.hpp"
#include "tenet/envs/descriptions.hpp"
#include "tenet/envs/dynamics.hpp"
#include "tenet/model/checkpoint.hpp"
#include "tenet/text/embedding.hpp"

namespace tenet {

// description -> embed -> project -> generate_policy. Uses no trajectory data.
ndiff::ParamVec instantiate(const TenetModel& model, std::string_view description, const TextEncoder& encoder);
// Same, after checking that the encoder is the one the checkpoint was trained with.
ndiff::ParamVec instantiate(const Checkpoint& ckpt, std::string_view description, const TextEncoder& encoder);

// Wraps a parameter vector as a closed-loop policy.
PolicyFn controller_policy(const ndiff::ParamVec& params);

// Supplies the prompt trajectory of a prompt-conditioned learner.
using PromptProvider = std::function<Trajectory(const TaskSpec& task, std::uint64_t seed)>;
// A fresh scripted-expert rollout of the task.
PromptProvider expert_prompts();
// Hands out the prompt of the next task in `tasks` (cyclically) instead of the
// requested one.
PromptProvider wrong_task_prompts(PromptProvider base, std::vector<TaskSpec> tasks);

// Produces the policy evaluated for one (task, seed) pair.
class PolicySource {
 public:
  virtual ~PolicySource() = default;
  virtual PolicyFn make(const TaskSpec& task, std::uint64_t seed) const = 0;
  virtual std::string describe() const = 0;
};

class ExpertSource final : public PolicySource {
 public:
  PolicyFn make(const TaskSpec& task, std::uint64_t seed) const override;
  std::string describe() const override { return "expert"; }
};

// One fixed controller for every task (a loaded controller file).
class ControllerSource final : public PolicySource {
 public:
  explicit ControllerSource(ndiff::ParamVec params) : params_(std::move(params)) {}
  PolicyFn make(const TaskSpec& task, std::uint64_t seed) const override;
  std::string describe() const override { return "controller"; }

 private:
  ndiff::ParamVec params_;
};

// Policies of a trained learner. TeNet instantiates from the canonical
// description (level L0) or from a fresh sample of the given level; prompt
// learners need a PromptProvider and throw MissingPromptError without one.
class ModelSource final : public PolicySource {
 public:
  ModelSource(const TenetModel& model, const TextEncoder* encoder, Level level = Level::L0,
              PromptProvider prompts = {});

  ndiff::ParamVec policy_params(const TaskSpec& task, std::uint64_t seed) const;
  // The description TeNet would be instantiated from for (task, seed).
  std::string description(const TaskSpec& task, std::uint64_t seed) const;
  PolicyFn make(const TaskSpec& task, std::uint64_t seed) const override;
  std::string describe() const override;

 private:
  const TenetModel& model_;
  const TextEncoder* encoder_;
  Level level_;
  PromptProvider prompts_;
};

}  // namespace tenet
