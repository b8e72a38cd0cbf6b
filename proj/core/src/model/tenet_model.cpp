#include "tenet/model/tenet_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/rng.hpp"

namespace tenet {

using ndiff::Activation;
using ndiff::Manifest;
using ndiff::Mat;
using ndiff::ParamVec;
using ndiff::Vec;

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::tenet: return "tenet";
    case ModelKind::bc_shared: return "bc-shared";
    case ModelKind::traj_hn: return "traj-hn";
    case ModelKind::prompt_concat: return "prompt-concat";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view s) {
  for (auto k : {ModelKind::tenet, ModelKind::bc_shared, ModelKind::traj_hn, ModelKind::prompt_concat}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::direct: return "direct";
    case Variant::mse: return "mse";
    case Variant::contrastive: return "contrastive";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view s) {
  for (auto v : {Variant::direct, Variant::mse, Variant::contrastive}) {
    if (s == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

bool needs_prompt(ModelKind k) { return k == ModelKind::traj_hn || k == ModelKind::prompt_concat; }

namespace {

void require_positive(const std::vector<int>& v, std::string_view what) {
  for (int x : v) {
    if (x < 1) throw ConfigError(std::string(what) + " widths must be positive");
  }
}

std::string_view to_string(HyperBias b) { return b == HyperBias::zero ? "zero" : "policy"; }

HyperBias hyper_bias_from_string(std::string_view s) {
  if (s == "zero") return HyperBias::zero;
  if (s == "policy") return HyperBias::policy;
  throw ConfigError("unknown hyper_bias '" + std::string(s) + "'");
}

std::vector<int> baseline_widths(const ModelConfig& c) {
  if (!c.baseline_hidden.empty()) return c.baseline_hidden;
  const int extra = c.kind == ModelKind::prompt_concat ? c.d_e : 0;
  return budget_matched_hidden(c.state_dim + extra, c.action_dim, tenet_trainable_count(c));
}

}  // namespace

void ModelConfig::validate() const {
  if (state_dim < 1 || action_dim < 1 || d_z < 1 || d_e < 1 || traj_feature_dim < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  require_positive(g_hidden, "g_hidden");
  require_positive(h_hidden, "h_hidden");
  require_positive(policy_hidden, "policy_hidden");
  require_positive(traj_head_hidden, "traj_head_hidden");
  require_positive(baseline_hidden, "baseline_hidden");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
  if (!(lambda_g >= 0.0) || !std::isfinite(lambda_g)) throw ConfigError("lambda_g must be non-negative");
  if (!(hyper_output_scale > 0.0)) throw ConfigError("hyper_output_scale must be positive");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"kind", tenet::to_string(kind)},
          {"variant", tenet::to_string(variant)},
          {"state_dim", state_dim},
          {"action_dim", action_dim},
          {"d_z", d_z},
          {"d_e", d_e},
          {"g_hidden", g_hidden},
          {"h_hidden", h_hidden},
          {"policy_hidden", policy_hidden},
          {"traj_feature_dim", traj_feature_dim},
          {"traj_head_hidden", traj_head_hidden},
          {"baseline_hidden", baseline_hidden},
          {"beta", beta},
          {"lambda_g", lambda_g},
          {"paraphrase_positive", paraphrase_positive},
          {"hyper_output_scale", hyper_output_scale},
          {"hyper_bias", to_string(hyper_bias)}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model config must be an object");
  ModelConfig c;
  const auto known = c.to_json();
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown model config key '" + key + "'");
  }
  try {
    if (j.contains("kind")) c.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
    auto get = [&](const char* key, auto& out) {
      if (j.contains(key)) j.at(key).get_to(out);
    };
    get("state_dim", c.state_dim);
    get("action_dim", c.action_dim);
    get("d_z", c.d_z);
    get("d_e", c.d_e);
    get("g_hidden", c.g_hidden);
    get("h_hidden", c.h_hidden);
    get("policy_hidden", c.policy_hidden);
    get("traj_feature_dim", c.traj_feature_dim);
    get("traj_head_hidden", c.traj_head_hidden);
    get("baseline_hidden", c.baseline_hidden);
    get("beta", c.beta);
    get("lambda_g", c.lambda_g);
    get("paraphrase_positive", c.paraphrase_positive);
    get("hyper_output_scale", c.hyper_output_scale);
    if (j.contains("hyper_bias")) c.hyper_bias = hyper_bias_from_string(j.at("hyper_bias").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

int transition_feature_dim(int state_dim, int action_dim) { return 2 * state_dim + action_dim + 1; }

Manifest g_manifest(const ModelConfig& c) {
  return ndiff::mlp_manifest("g", c.d_z, c.g_hidden, c.d_e, Activation::tanh, Activation::linear);
}

Manifest policy_manifest(const ModelConfig& c) {
  if (c.kind == ModelKind::bc_shared || c.kind == ModelKind::prompt_concat) {
    return ndiff::mlp_manifest("pi", c.state_dim, baseline_widths(c), c.action_dim, Activation::tanh,
                               Activation::tanh);
  }
  return ndiff::mlp_manifest("pi", c.state_dim, c.policy_hidden, c.action_dim, Activation::tanh, Activation::tanh);
}

Manifest concat_policy_manifest(const ModelConfig& c) {
  return ndiff::mlp_manifest("pi", c.state_dim + c.d_e, baseline_widths(c), c.action_dim, Activation::tanh,
                             Activation::tanh);
}

Manifest h_manifest(const ModelConfig& c) {
  ModelConfig pc = c;
  pc.kind = ModelKind::tenet;
  return ndiff::mlp_manifest("h", c.d_e, c.h_hidden, static_cast<int>(ndiff::count_params(policy_manifest(pc))),
                             Activation::tanh, Activation::linear);
}

Manifest traj_feature_manifest(const ModelConfig& c) {
  return ndiff::mlp_manifest("traj/feat", transition_feature_dim(c.state_dim, c.action_dim), {},
                             c.traj_feature_dim, Activation::tanh, Activation::tanh);
}

Manifest traj_head_manifest(const ModelConfig& c) {
  return ndiff::mlp_manifest("traj/head", c.traj_feature_dim, c.traj_head_hidden, c.d_e, Activation::tanh,
                             Activation::linear);
}

Manifest traj_manifest(const ModelConfig& c) {
  Manifest m = traj_feature_manifest(c);
  const Manifest head = traj_head_manifest(c);
  m.insert(m.end(), head.begin(), head.end());
  return m;
}

std::size_t tenet_trainable_count(const ModelConfig& c) {
  return ndiff::count_params(g_manifest(c)) + ndiff::count_params(h_manifest(c)) +
         ndiff::count_params(traj_manifest(c));
}

std::vector<int> budget_matched_hidden(int in, int out, std::size_t target) {
  // Two hidden layers of width w: (in + 1) w + (w + 1) w + (w + 1) out.
  auto count = [&](long w) {
    return static_cast<double>((in + 1) * w + (w + 1) * w + (w + 1) * out);
  };
  long best = 1;
  for (long w = 1; w < 100000; ++w) {
    if (std::abs(count(w) - static_cast<double>(target)) < std::abs(count(best) - static_cast<double>(target))) {
      best = w;
    }
    if (count(w) > static_cast<double>(target)) break;
  }
  return {static_cast<int>(best), static_cast<int>(best)};
}

std::vector<std::string> block_names(ModelKind kind) {
  switch (kind) {
    case ModelKind::tenet: return {"g", "h", "traj"};
    case ModelKind::bc_shared: return {"policy"};
    case ModelKind::traj_hn: return {"h", "traj"};
    case ModelKind::prompt_concat: return {"traj", "policy"};
  }
  return {};
}

namespace {

Manifest expected_manifest(const ModelConfig& c, std::string_view name) {
  if (name == "g") return g_manifest(c);
  if (name == "h") return h_manifest(c);
  if (name == "traj") return traj_manifest(c);
  if (c.kind == ModelKind::prompt_concat) return concat_policy_manifest(c);
  return policy_manifest(c);
}

}  // namespace

TenetModel::TenetModel(ModelConfig config, std::vector<Block> blocks)
    : config_(std::move(config)), blocks_(std::move(blocks)) {
  config_.validate();
  const auto names = block_names(config_.kind);
  if (blocks_.size() != names.size()) throw ShapeError("model has the wrong number of parameter blocks");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (blocks_[i].name != names[i]) throw ShapeError("unexpected parameter block '" + blocks_[i].name + "'");
    if (blocks_[i].params.manifest() != expected_manifest(config_, names[i])) {
      throw ShapeError("block '" + names[i] + "' does not match the configured layout");
    }
    blocks_[i].params.validate();
  }
  policy_manifest_ = tenet::policy_manifest(config_);
  if (has_block("h") && block("h").output_dim() != static_cast<int>(ndiff::count_params(policy_manifest_))) {
    throw ShapeError("hypernetwork output length does not match the policy manifest");
  }
}

TenetModel TenetModel::initialize(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::vector<Block> blocks;
  for (const auto& name : block_names(config.kind)) {
    ParamVec p = ParamVec::zeros(expected_manifest(config, name));
    Rng rng(Rng::derive(seed, {io::fnv1a64(name)}));
    ndiff::glorot_init(p, rng);
    if (name == "h") {
      const std::size_t last = p.manifest().size() - 1;
      ndiff::glorot_init_layer(p, last, rng, config.hyper_output_scale);
      if (config.hyper_bias == HyperBias::policy) {
        ParamVec base = ParamVec::zeros(tenet::policy_manifest(config));
        Rng brng(Rng::derive(seed, {io::fnv1a64("h/bias")}));
        ndiff::glorot_init(base, brng);
        const auto& layer = p.manifest()[last];
        const std::size_t bias_at = p.offset_of(last) + static_cast<std::size_t>(layer.in) * layer.out;
        p.values().segment(static_cast<Eigen::Index>(bias_at), base.values().size()) = base.values();
      }
    }
    blocks.push_back({name, std::move(p)});
  }
  return TenetModel(config, std::move(blocks));
}

bool TenetModel::has_block(std::string_view name) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.name == name; });
}

const ParamVec& TenetModel::block(std::string_view name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b.params;
  }
  throw CapabilityError(std::string(to_string(config_.kind)) + " model has no '" + std::string(name) + "' block");
}

ParamVec& TenetModel::block(std::string_view name) {
  return const_cast<ParamVec&>(static_cast<const TenetModel&>(*this).block(name));
}

std::size_t TenetModel::trainable_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.params.size();
  return n;
}

Vec TenetModel::project(const EmbeddingVec& z_d) const {
  if (z_d.dim() != config_.d_z) {
    throw ShapeError("text embedding has dimension " + std::to_string(z_d.dim()) + ", model expects " +
                     std::to_string(config_.d_z));
  }
  return ndiff::mlp_forward(block("g"), std::span<const double>(z_d.values.data(), z_d.values.size()));
}

Mat TenetModel::project_batch(const Mat& z_d) const { return ndiff::mlp_forward_batch(block("g"), z_d); }

ParamVec TenetModel::generate_policy(const Vec& z_tilde) const {
  if (z_tilde.size() != config_.d_e) throw ShapeError("conditioning vector has the wrong dimension");
  Vec theta = ndiff::mlp_forward(block("h"), std::span<const double>(z_tilde.data(), z_tilde.size()));
  return ParamVec(policy_manifest_, std::move(theta));
}

Mat featurize(const Trajectory& traj) {
  if (traj.transitions.empty()) throw InputError("cannot encode an empty trajectory");
  const auto& t0 = traj.transitions.front();
  const auto sd = static_cast<Eigen::Index>(t0.state.size());
  const auto ad = static_cast<Eigen::Index>(t0.action.size());
  Mat f(static_cast<Eigen::Index>(traj.transitions.size()), 2 * sd + ad + 1);
  for (std::size_t i = 0; i < traj.transitions.size(); ++i) {
    const auto& t = traj.transitions[i];
    if (static_cast<Eigen::Index>(t.state.size()) != sd || static_cast<Eigen::Index>(t.action.size()) != ad ||
        static_cast<Eigen::Index>(t.next_state.size()) != sd) {
      throw ShapeError("trajectory transitions have inconsistent dimensions");
    }
    auto r = f.row(static_cast<Eigen::Index>(i));
    Eigen::Index c = 0;
    for (double v : t.state) r(c++) = v;
    for (double v : t.action) r(c++) = v;
    r(c++) = t.reward;
    for (double v : t.next_state) r(c++) = v;
  }
  return f;
}

Vec TenetModel::encode_features(const Mat& features) const {
  const ParamVec& p = block("traj");
  const Manifest feat = traj_feature_manifest(config_);
  const Manifest head = traj_head_manifest(config_);
  if (features.rows() == 0) throw InputError("cannot encode an empty trajectory");
  if (features.cols() != feat.front().in) throw ShapeError("trajectory features have the wrong width");
  const std::size_t split = ndiff::count_params(feat);
  ParamVec fp(feat, p.values().head(static_cast<Eigen::Index>(split)));
  ParamVec hp(head, p.values().tail(static_cast<Eigen::Index>(p.size() - split)));
  const Mat pooled = ndiff::mlp_forward_batch(fp, features).colwise().mean();
  return ndiff::mlp_forward_batch(hp, pooled).row(0).transpose();
}

Vec TenetModel::encode_trajectory(const Trajectory& traj) const { return encode_features(featurize(traj)); }

ParamVec TenetModel::shared_policy() const {
  if (config_.kind != ModelKind::bc_shared) {
    throw CapabilityError(std::string(to_string(config_.kind)) + " has no task-independent policy");
  }
  return block("policy");
}

ParamVec TenetModel::policy_from_prompt(const Trajectory& prompt) const {
  const Vec z = encode_trajectory(prompt);
  if (config_.kind == ModelKind::traj_hn) return generate_policy(z);
  if (config_.kind != ModelKind::prompt_concat) {
    throw CapabilityError(std::string(to_string(config_.kind)) + " is not prompt-conditioned");
  }
  // Fold the fixed prompt embedding into the first layer's bias so that the
  // deployed controller is a plain state -> action network.
  const ParamVec& full = block("policy");
  ParamVec out = ParamVec::zeros(policy_manifest_);
  const auto& l0 = full.manifest().front();
  const int sd = config_.state_dim;
  Eigen::Map<const Mat> w(full.values().data(), l0.out, l0.in);
  Eigen::Map<const Vec> b(full.values().data() + static_cast<std::size_t>(l0.in) * l0.out, l0.out);
  Eigen::Map<Mat> w_out(out.values().data(), l0.out, sd);
  Eigen::Map<Vec> b_out(out.values().data() + static_cast<std::size_t>(sd) * l0.out, l0.out);
  w_out = w.leftCols(sd);
  b_out = b + w.rightCols(config_.d_e) * z;
  const std::size_t rest_in = full.offset_of(1);
  const std::size_t rest_out = out.offset_of(1);
  out.values().tail(static_cast<Eigen::Index>(out.size() - rest_out)) =
      full.values().tail(static_cast<Eigen::Index>(full.size() - rest_in));
  return out;
}

}  // namespace tenet
