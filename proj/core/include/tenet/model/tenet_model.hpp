#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/envs/task.hpp"
#include "tenet/ndiff/param_vec.hpp"
#include "tenet/text/embedding.hpp"

namespace tenet {

// tenet: text -> g -> h -> policy. The others are the comparison learners:
// bc_shared has no task signal, traj_hn conditions h on a prompt trajectory,
// prompt_concat feeds a pooled prompt embedding next to the state.
enum class ModelKind { tenet, bc_shared, traj_hn, prompt_concat };
enum class Variant { direct, mse, contrastive };

std::string_view to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);
std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

// Whether the kind needs a prompt trajectory to produce a policy.
bool needs_prompt(ModelKind k);

enum class HyperBias { zero, policy };

struct ModelConfig {
  ModelKind kind = ModelKind::tenet;
  Variant variant = Variant::contrastive;
  int state_dim = 4;
  int action_dim = 2;
  int d_z = 256;
  int d_e = 64;
  std::vector<int> g_hidden{128};
  std::vector<int> h_hidden{256, 256};
  std::vector<int> policy_hidden{64, 64};
  int traj_feature_dim = 64;
  std::vector<int> traj_head_hidden{64};
  // Hidden widths of the bc_shared / prompt_concat policy; empty means
  // "solve a two-layer width that matches the TeNet trainable total".
  std::vector<int> baseline_hidden;
  double beta = 0.1;
  double lambda_g = 1.0;
  // Use a second description of the same task as the text-text positive.
  bool paraphrase_positive = false;
  double hyper_output_scale = 0.01;
  // zero: h's output bias starts at 0. policy: it starts at a Glorot-initialized
  // policy, so every generated policy starts near one shared random network.
  HyperBias hyper_bias = HyperBias::zero;

  void validate() const;
  nlohmann::json to_json() const;
  // Rejects unknown keys; missing keys keep their defaults.
  static ModelConfig from_json(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

int transition_feature_dim(int state_dim, int action_dim);

// Layer layouts derived from a config.
ndiff::Manifest g_manifest(const ModelConfig& c);
ndiff::Manifest h_manifest(const ModelConfig& c);
ndiff::Manifest traj_feature_manifest(const ModelConfig& c);
ndiff::Manifest traj_head_manifest(const ModelConfig& c);
ndiff::Manifest traj_manifest(const ModelConfig& c);
// Manifest of the deployed controller (state -> action) for every kind.
ndiff::Manifest policy_manifest(const ModelConfig& c);
// prompt_concat network over [state ; prompt embedding].
ndiff::Manifest concat_policy_manifest(const ModelConfig& c);
// Trainable parameter count of the tenet kind under this config.
std::size_t tenet_trainable_count(const ModelConfig& c);
// Two equal hidden widths for a state+extra -> action MLP whose parameter
// count is closest to target.
std::vector<int> budget_matched_hidden(int in, int out, std::size_t target);

struct Block {
  std::string name;
  ndiff::ParamVec params;
  bool operator==(const Block&) const = default;
};

// Parameters of one learner, stored as named blocks: g, h, traj, policy.
class TenetModel {
 public:
  TenetModel(ModelConfig config, std::vector<Block> blocks);

  // Each block draws from its own seed-derived stream, so adding or removing
  // a block never changes the others' initial values.
  static TenetModel initialize(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::vector<Block>& blocks() { return blocks_; }
  bool has_block(std::string_view name) const;
  const ndiff::ParamVec& block(std::string_view name) const;
  ndiff::ParamVec& block(std::string_view name);
  std::size_t trainable_count() const;

  const ndiff::Manifest& policy_manifest() const { return policy_manifest_; }

  // z~ = g(z_d).
  ndiff::Vec project(const EmbeddingVec& z_d) const;
  ndiff::Mat project_batch(const ndiff::Mat& z_d) const;
  // theta = h(z~), shaped by policy_manifest().
  ndiff::ParamVec generate_policy(const ndiff::Vec& z_tilde) const;
  // z_xi = head(mean_t featurize(s, a, r, s')).
  ndiff::Vec encode_trajectory(const Trajectory& traj) const;
  ndiff::Vec encode_features(const ndiff::Mat& features) const;

  // Deployed policy of a learner that needs no task signal (bc_shared).
  ndiff::ParamVec shared_policy() const;
  // Policy of a prompt-conditioned learner for a given prompt trajectory.
  ndiff::ParamVec policy_from_prompt(const Trajectory& prompt) const;

  bool operator==(const TenetModel&) const = default;

 private:
  ModelConfig config_;
  std::vector<Block> blocks_;
  ndiff::Manifest policy_manifest_;
};

// Rows of (s, a, r, s') for every transition. Throws InputError when empty.
ndiff::Mat featurize(const Trajectory& traj);

// Block names a kind carries, in storage order.
std::vector<std::string> block_names(ModelKind kind);

}  // namespace tenet
