#include "tenet/train/policy_source.hpp"

#include <memory>

#include "tenet/data/experts.hpp"
#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/rng.hpp"

namespace tenet {

ndiff::ParamVec instantiate(const TenetModel& model, std::string_view description, const TextEncoder& encoder) {
  if (model.config().kind != ModelKind::tenet) {
    throw CapabilityError(std::string(to_string(model.config().kind)) + " models are not text-conditioned");
  }
  if (encoder.dim() != model.config().d_z) {
    throw ShapeError("text encoder produces " + std::to_string(encoder.dim()) + " dims, model expects " +
                     std::to_string(model.config().d_z));
  }
  return model.generate_policy(model.project(encoder.embed(description)));
}

ndiff::ParamVec instantiate(const Checkpoint& ckpt, std::string_view description, const TextEncoder& encoder) {
  const auto expected = ckpt.meta.value("encoder", std::string());
  if (!expected.empty() && expected != encoder.fingerprint()) {
    throw ConfigError("checkpoint was trained with text encoder '" + expected + "', got '" +
                      encoder.fingerprint() + "'");
  }
  return instantiate(ckpt.model, description, encoder);
}

PolicyFn controller_policy(const ndiff::ParamVec& params) {
  auto ctrl = std::make_shared<ndiff::DenseController<double>>(params);
  return [ctrl](std::span<const double> s, std::span<double> a) { ctrl->forward(s, a); };
}

PromptProvider expert_prompts() {
  return [](const TaskSpec& task, std::uint64_t seed) {
    return rollout(task, Rng::derive(seed, {io::fnv1a64(task.id), 0x9f0d7ULL}), expert_policy(task)).trajectory;
  };
}

PromptProvider wrong_task_prompts(PromptProvider base, std::vector<TaskSpec> tasks) {
  if (tasks.size() < 2) throw ConfigError("a wrong-task prompt needs at least two tasks");
  return [base = std::move(base), tasks = std::move(tasks)](const TaskSpec& task, std::uint64_t seed) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].id == task.id) return base(tasks[(i + 1) % tasks.size()], seed);
    }
    throw ConfigError("task '" + task.id + "' is not in the wrong-prompt task list");
  };
}

PolicyFn ExpertSource::make(const TaskSpec& task, std::uint64_t) const { return expert_policy(task); }

PolicyFn ControllerSource::make(const TaskSpec& task, std::uint64_t) const {
  if (params_.input_dim() != task.state_dim() || params_.output_dim() != task.action_dim()) {
    throw ShapeError("controller does not fit task '" + task.id + "'");
  }
  return controller_policy(params_);
}

ModelSource::ModelSource(const TenetModel& model, const TextEncoder* encoder, Level level, PromptProvider prompts)
    : model_(model), encoder_(encoder), level_(level), prompts_(std::move(prompts)) {
  if (model.config().kind == ModelKind::tenet && encoder == nullptr) {
    throw ConfigError("a text encoder is required to instantiate TeNet policies");
  }
}

std::string ModelSource::description(const TaskSpec& task, std::uint64_t seed) const {
  if (level_ == Level::L0) return canonical_description(task);
  return sample_description(task, level_, Rng::derive(seed, {io::fnv1a64(task.id), 0xde5cULL}));
}

ndiff::ParamVec ModelSource::policy_params(const TaskSpec& task, std::uint64_t seed) const {
  switch (model_.config().kind) {
    case ModelKind::tenet: return instantiate(model_, description(task, seed), *encoder_);
    case ModelKind::bc_shared: return model_.shared_policy();
    case ModelKind::traj_hn:
    case ModelKind::prompt_concat:
      if (!prompts_) {
        throw MissingPromptError(std::string(to_string(model_.config().kind)) +
                                 " cannot act without a prompt trajectory for task '" + task.id + "'");
      }
      return model_.policy_from_prompt(prompts_(task, seed));
  }
  throw ConfigError("unknown model kind");
}

PolicyFn ModelSource::make(const TaskSpec& task, std::uint64_t seed) const {
  return controller_policy(policy_params(task, seed));
}

std::string ModelSource::describe() const {
  std::string s(to_string(model_.config().kind));
  if (model_.config().kind == ModelKind::tenet) {
    s += "/" + std::string(to_string(model_.config().variant)) + "/" + std::string(to_string(level_));
  }
  return s;
}

}  // namespace tenet
