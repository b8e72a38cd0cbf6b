#include "tenet/train/learners.hpp"

#include <algorithm>
#include <numeric>

#include "tenet/error.hpp"
#include "tenet/rng.hpp"

namespace tenet {

using ndiff::Mat;
using ndiff::Vec;

void TrainConfig::validate() const {
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_tasks < 0) throw ConfigError("batch_tasks must be non-negative");
  if (bc_transitions < 1) throw ConfigError("bc_transitions must be positive");
  if (log_every < 1) throw ConfigError("log_every must be positive");
  if (levels.empty()) throw ConfigError("training needs at least one description level");
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (Level l : levels) lv.push_back(to_string(l));
  return {{"steps", steps},
          {"lr", lr},
          {"batch_tasks", batch_tasks},
          {"bc_transitions", bc_transitions},
          {"log_every", log_every},
          {"seed", seed},
          {"levels", lv},
          {"adam_beta1", adam.beta1},
          {"adam_beta2", adam.beta2},
          {"adam_epsilon", adam.epsilon}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train config must be an object");
  TrainConfig c;
  const auto known = c.to_json();
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown train config key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& out) {
      if (j.contains(key)) j.at(key).get_to(out);
    };
    get("steps", c.steps);
    get("lr", c.lr);
    get("batch_tasks", c.batch_tasks);
    get("bc_transitions", c.bc_transitions);
    get("log_every", c.log_every);
    get("seed", c.seed);
    get("adam_beta1", c.adam.beta1);
    get("adam_beta2", c.adam.beta2);
    get("adam_epsilon", c.adam.epsilon);
    if (j.contains("levels")) {
      c.levels.clear();
      for (const auto& l : j.at("levels")) c.levels.push_back(level_from_string(l.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

int effective_batch_tasks(const TrainConfig& config, std::size_t n_train) {
  const int n = static_cast<int>(n_train);
  return config.batch_tasks == 0 ? std::min(32, n) : std::min(config.batch_tasks, n);
}

TextBank::TextBank(const OfflineDataset& dataset, std::span<const Level> levels, const TextEncoder& encoder) {
  std::unordered_map<std::string, Vec> cache;
  for (const auto& td : dataset.tasks) {
    std::vector<Vec> rows;
    for (Level level : levels) {
      const auto it = td.descriptions.find(level);
      if (it == td.descriptions.end()) {
        throw ConfigError("dataset has no " + std::string(to_string(level)) + " descriptions for " + td.task.id);
      }
      for (const auto& text : it->second) {
        auto hit = cache.find(text);
        if (hit == cache.end()) hit = cache.emplace(text, encoder.embed(text).values).first;
        rows.push_back(hit->second);
      }
    }
    embeddings_.push_back(std::move(rows));
  }
}

BatchSampler::BatchSampler(const OfflineDataset& dataset, std::span<const std::string> train_ids,
                           const TextBank& bank, const TrainConfig& config)
    : bank_(bank), config_(config) {
  config_.validate();
  if (train_ids.empty()) throw ConfigError("no training tasks");
  for (const auto& id : train_ids) {
    std::size_t index = dataset.tasks.size();
    for (std::size_t i = 0; i < dataset.tasks.size(); ++i) {
      if (dataset.tasks[i].task.id == id) index = i;
    }
    if (index == dataset.tasks.size()) throw ConfigError("train task '" + id + "' is not in the dataset");
    const auto& td = dataset.tasks[index];
    TaskCache c;
    c.id = id;
    c.dataset_index = index;
    const auto n = static_cast<Eigen::Index>(td.transition_count());
    const int sd = td.task.state_dim();
    const int ad = td.task.action_dim();
    c.states.resize(n, sd);
    c.actions.resize(n, ad);
    Eigen::Index r = 0;
    for (const auto& tr : td.trajectories) {
      for (const auto& t : tr.transitions) {
        for (int j = 0; j < sd; ++j) c.states(r, j) = t.state[static_cast<std::size_t>(j)];
        for (int j = 0; j < ad; ++j) c.actions(r, j) = t.action[static_cast<std::size_t>(j)];
        ++r;
      }
      c.features.push_back(featurize(tr));
    }
    tasks_.push_back(std::move(c));
  }
  batch_ = effective_batch_tasks(config_, tasks_.size());
}

TrainBatch BatchSampler::sample(std::int64_t step) const {
  const auto s = static_cast<std::uint64_t>(step);
  Rng pick(Rng::derive(config_.seed, {s, 0}));
  Rng bc(Rng::derive(config_.seed, {s, 1}));
  Rng traj(Rng::derive(config_.seed, {s, 2}));
  Rng text(Rng::derive(config_.seed, {s, 3}));

  std::vector<std::size_t> order(tasks_.size());
  std::iota(order.begin(), order.end(), 0);
  pick.shuffle(order);
  order.resize(static_cast<std::size_t>(batch_));

  TrainBatch batch;
  const int n = config_.bc_transitions;
  for (std::size_t i : order) {
    const auto& c = tasks_[i];
    BatchEntry e;
    e.task_id = c.id;
    e.states.resize(n, c.states.cols());
    e.actions.resize(n, c.actions.cols());
    for (int r = 0; r < n; ++r) {
      const auto row = static_cast<Eigen::Index>(bc.below(static_cast<std::size_t>(c.states.rows())));
      e.states.row(r) = c.states.row(row);
      e.actions.row(r) = c.actions.row(row);
    }
    e.trajectory = c.features[traj.below(c.features.size())];
    const auto& texts = bank_.of(c.dataset_index);
    e.text = texts[text.below(texts.size())];
    e.text_positive = texts[text.below(texts.size())];
    batch.entries.push_back(std::move(e));
  }
  return batch;
}

}  // namespace tenet
