#include "tenet/io/run_config.hpp"

#include "tenet/envs/registry.hpp"
#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"

namespace tenet::io {

namespace {

void reject_unknown(const nlohmann::json& j, const nlohmann::json& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

nlohmann::json dataset_json(const DatasetOptions& d) { return d.to_json(); }

DatasetOptions dataset_from_json(const nlohmann::json& j) {
  DatasetOptions d;
  reject_unknown(j, dataset_json(d), "dataset");
  if (j.contains("K")) d.trajectories_per_task = j.at("K");
  if (j.contains("M")) d.descriptions_per_level = j.at("M");
  if (j.contains("seed")) d.seed = j.at("seed");
  if (j.contains("gate_rollouts")) d.gate_rollouts = j.at("gate_rollouts");
  if (j.contains("gate_threshold")) d.gate_threshold = j.at("gate_threshold");
  if (j.contains("levels")) {
    d.levels.clear();
    for (const auto& l : j.at("levels")) d.levels.push_back(level_from_string(l.get<std::string>()));
  }
  return d;
}

}  // namespace

void RunConfig::finalize() {
  const Family family = suite_family(suite);
  if (task_count < 0) throw ConfigError("task_count must be non-negative");
  if (family == Family::point_goal_2d && task_count < 1) throw ConfigError("pointgoal2d needs task_count >= 1");
  const TaskSpec probe = family == Family::vel_track_1d ? vel_track_task(1.0) : TaskSpec{};
  model.state_dim = probe.state_dim();
  model.action_dim = probe.action_dim();
  if (provider.kind != "hash" && provider.kind != "table") {
    throw ConfigError("provider.kind must be 'hash' or 'table'");
  }
  if (provider.kind == "table" && provider.table.empty()) throw ConfigError("provider.table path is required");
  model.d_z = provider.dim;
  if (split.holdout_fraction && !(*split.holdout_fraction > 0.0 && *split.holdout_fraction < 1.0)) {
    throw ConfigError("split.holdout_fraction must lie in (0, 1)");
  }
  if (eval.rollouts < 1 || eval.seeds.empty()) throw ConfigError("eval needs rollouts >= 1 and a seed");
  if (dataset.trajectories_per_task < 1 || dataset.descriptions_per_level < 1 || dataset.levels.empty()) {
    throw ConfigError("dataset needs K >= 1, M >= 1 and a level");
  }
  model.validate();
  train.validate();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json sp = {{"seed", split.seed}};
  sp["holdout_fraction"] = split.holdout_fraction ? nlohmann::json(*split.holdout_fraction) : nlohmann::json();
  return {{"suite", suite},
          {"task_count", task_count},
          {"registry_seed", registry_seed},
          {"split", sp},
          {"dataset", dataset_json(dataset)},
          {"model", model.to_json()},
          {"train", train.to_json()},
          {"eval", {{"rollouts", eval.rollouts}, {"seeds", eval.seeds}}},
          {"provider", {{"kind", provider.kind}, {"dim", provider.dim}, {"table", provider.table}}},
          {"output", output}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  const auto known = c.to_json();
  reject_unknown(j, known, "run config");
  try {
    if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
    if (j.contains("task_count")) c.task_count = j.at("task_count");
    if (j.contains("registry_seed")) c.registry_seed = j.at("registry_seed");
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("split")) {
      const auto& s = j.at("split");
      reject_unknown(s, known.at("split"), "split");
      if (s.contains("seed")) c.split.seed = s.at("seed");
      if (s.contains("holdout_fraction") && !s.at("holdout_fraction").is_null()) {
        c.split.holdout_fraction = s.at("holdout_fraction").get<double>();
      }
    }
    if (j.contains("dataset")) c.dataset = dataset_from_json(j.at("dataset"));
    if (j.contains("model")) c.model = ModelConfig::from_json(j.at("model"));
    if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train"));
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      reject_unknown(e, known.at("eval"), "eval");
      if (e.contains("rollouts")) c.eval.rollouts = e.at("rollouts");
      if (e.contains("seeds")) c.eval.seeds = e.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (j.contains("provider")) {
      const auto& p = j.at("provider");
      reject_unknown(p, known.at("provider"), "provider");
      if (p.contains("kind")) c.provider.kind = p.at("kind").get<std::string>();
      if (p.contains("dim")) c.provider.dim = p.at("dim");
      if (p.contains("table")) c.provider.table = p.at("table").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  c.finalize();
  return c;
}

std::string RunConfig::hash() const { return config_hash(to_json()); }

std::string RunConfig::data_hash() const {
  const auto j = to_json();
  return config_hash({{"suite", j["suite"]},
                      {"task_count", j["task_count"]},
                      {"registry_seed", j["registry_seed"]},
                      {"split", j["split"]},
                      {"dataset", j["dataset"]}});
}

std::string RunConfig::model_hash() const {
  const auto j = to_json();
  return config_hash(
      {{"data", data_hash()}, {"model", j["model"]}, {"train", j["train"]}, {"provider", j["provider"]}});
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file " + path.string() + " does not exist");
  try {
    return RunConfig::from_json(nlohmann::json::parse(read_file(path.string())));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json merge_patch(nlohmann::json base, const nlohmann::json& patch) {
  if (!patch.is_object() || !base.is_object()) return patch;
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      base[key] = merge_patch(base[key], value);
    } else {
      base[key] = value;
    }
  }
  return base;
}

std::vector<TaskSpec> registry_of(const RunConfig& c) { return task_registry(c.suite, c.task_count, c.registry_seed); }

TaskSplit split_of(const RunConfig& c, std::span<const TaskSpec> tasks) {
  return split_tasks(tasks, c.split.holdout_fraction, c.split.seed);
}

std::unique_ptr<TextEncoder> make_encoder(const ProviderConfig& p) {
  if (p.kind == "hash") return std::make_unique<HashEmbedder>(p.dim);
  if (p.kind == "table") {
    auto table = std::make_unique<EmbeddingTable>(EmbeddingTable::load(p.table));
    if (table->dim() != p.dim) {
      throw ConfigError("embedding table " + p.table + " has dim " + std::to_string(table->dim()) +
                        ", provider.dim says " + std::to_string(p.dim));
    }
    return table;
  }
  throw ConfigError("unknown provider kind '" + p.kind + "'");
}

}  // namespace tenet::io
