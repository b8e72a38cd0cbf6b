#include "tenet/train/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

TrainResult fit(ModelConfig model, TrainConfig train, std::uint64_t seed, const OfflineDataset& dataset,
                std::span<const TaskSpec> train_tasks, const TextEncoder& encoder, nlohmann::json meta) {
  if (dataset.tasks.empty()) throw ConfigError("cannot train on an empty dataset");
  model.state_dim = dataset.state_dim();
  model.action_dim = dataset.action_dim();
  model.d_z = encoder.dim();
  train.seed = seed;
  TrainRequest req;
  req.model = model;
  req.train = train;
  for (const auto& t : train_tasks) req.train_ids.push_back(t.id);
  req.meta = std::move(meta);
  return tenet::train(req, dataset, encoder);
}

// ---- velocity alignment -------------------------------------------------

std::vector<VelocityPoint> velocity_alignment(const PolicySource& source, std::span<const double> targets,
                                              int n_rollouts, std::uint64_t seed) {
  if (n_rollouts < 1) throw ConfigError("n_rollouts must be positive");
  if (targets.empty()) throw ConfigError("velocity alignment needs at least one target");
  std::vector<VelocityPoint> curve;
  for (double target : targets) {
    const TaskSpec task = vel_track_task(target);
    const auto policy = source.make(task, seed);
    std::vector<double> achieved;
    for (int r = 0; r < n_rollouts; ++r) {
      const auto out =
          rollout(task, Rng::derive(seed, {io::fnv1a64(task.id), static_cast<std::uint64_t>(r)}), policy);
      achieved.push_back(out.failed ? std::nan("") : achieved_velocity(out.trajectory));
    }
    const auto [m, s] = mean_std(achieved);
    curve.push_back({target, m, s, n_rollouts, target > EnvConstants::vel_max});
  }
  return curve;
}

std::vector<double> velocity_study_targets() {
  const auto held = vel_track_heldout_targets();
  std::vector<double> out(held.begin(), held.end());
  out.push_back(kVelTrackOodTarget);
  return out;
}

std::string velocity_csv(std::span<const VelocityPoint> curve) {
  std::string out = "instructed,achieved_mean,achieved_std,rollouts,out_of_range\n";
  for (const auto& p : curve) {
    out += fmt("%.3f", p.instructed) + "," + fmt("%.6f", p.achieved_mean) + "," + fmt("%.6f", p.achieved_std) +
           "," + std::to_string(p.rollouts) + "," + (p.out_of_range ? "1" : "0") + "\n";
  }
  return out;
}

nlohmann::json velocity_json(std::span<const VelocityPoint> curve) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : curve) {
    rows.push_back({{"instructed", p.instructed},
                    {"achieved_mean", p.achieved_mean},
                    {"achieved_std", p.achieved_std},
                    {"rollouts", p.rollouts},
                    {"out_of_range", p.out_of_range}});
  }
  return {{"format", "tenet-velocity-curve"}, {"version", 1}, {"rows", rows}};
}

// ---- task scaling ---------------------------------------------------------

void validate_scaling_sizes(std::span<const int> sizes, double holdout_fraction) {
  if (sizes.empty()) throw ConfigError("task scaling needs at least one size");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie strictly between 0 and 1");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0 && sizes[i] == sizes[i - 1]) {
      throw ConfigError("duplicate task-scaling size " + std::to_string(sizes[i]));
    }
    if (i > 0 && sizes[i] < sizes[i - 1]) throw ConfigError("task-scaling sizes must be ascending");
    const long test = std::lround(holdout_fraction * sizes[i]);
    if (test < 1 || test >= sizes[i]) {
      throw ConfigError("size " + std::to_string(sizes[i]) + " leaves an empty train or test split");
    }
  }
}

std::vector<ScalingRow> task_scaling(const ScalingOptions& options, const TextEncoder& encoder,
                                     const ProgressFn& progress) {
  validate_scaling_sizes(options.sizes, options.holdout_fraction);
  if (options.seeds.empty()) throw ConfigError("task scaling needs at least one seed");
  std::vector<ScalingRow> rows;
  for (int size : options.sizes) {
    const auto tasks = task_registry("pointgoal2d", size, options.registry_seed);
    const auto split = split_tasks(tasks, options.holdout_fraction, options.split_seed);
    const auto dataset = generate_dataset(split.train, options.dataset, "pointgoal2d");
    ScalingRow row;
    row.registry_size = size;
    row.train_tasks = static_cast<int>(split.train.size());
    row.test_tasks = static_cast<int>(split.test.size());
    const auto test = label_tasks(split.test, "test");
    for (auto seed : options.seeds) {
      say(progress, "scaling: size " + std::to_string(size) + " seed " + std::to_string(seed));
      const auto result = fit(options.model, options.train, seed, dataset, split.train, encoder);
      const ModelSource source(result.checkpoint.model, &encoder);
      const auto report = evaluate(source, test, {options.n_rollouts, {seed}});
      row.per_seed.push_back(report.success("test"));
    }
    std::tie(row.mean, row.std) = mean_std(row.per_seed);
    say(progress, "scaling: size " + std::to_string(size) + " held-out success " + fmt("%.3f", row.mean));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string scaling_csv(std::span<const ScalingRow> rows) {
  std::string out = "registry_size,train_tasks,test_tasks,seeds,mean_success,std_success\n";
  for (const auto& r : rows) {
    out += std::to_string(r.registry_size) + "," + std::to_string(r.train_tasks) + "," +
           std::to_string(r.test_tasks) + "," + std::to_string(r.per_seed.size()) + "," + fmt("%.6f", r.mean) +
           "," + fmt("%.6f", r.std) + "\n";
  }
  return out;
}

nlohmann::json scaling_json(std::span<const ScalingRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"registry_size", r.registry_size},
                   {"train_tasks", r.train_tasks},
                   {"test_tasks", r.test_tasks},
                   {"per_seed", r.per_seed},
                   {"mean_success", r.mean},
                   {"std_success", r.std}});
  }
  return {{"format", "tenet-scaling-table"}, {"version", 1}, {"rows", out}};
}

// ---- paraphrase robustness ------------------------------------------------

std::vector<ParaphraseRow> paraphrase_eval(const TenetModel& model, const TextEncoder& encoder,
                                           const std::string& provider, std::span<const TaskSpec> tasks,
                                           std::span<const Level> levels, const EvalOptions& eval) {
  if (model.config().kind != ModelKind::tenet) {
    throw ConfigError("paraphrase evaluation needs a text-conditioned model");
  }
  if (levels.empty()) throw ConfigError("paraphrase evaluation needs at least one level");
  const auto labelled = label_tasks(tasks, "train");
  std::vector<ParaphraseRow> rows;
  for (Level level : levels) {
    for (const auto& t : tasks) {
      // Every family defines all levels today; this keeps the contract explicit.
      if (sample_description(t, level, 0).empty()) {
        throw ConfigError("level " + std::string(to_string(level)) + " is unavailable for task '" + t.id + "'");
      }
    }
    const ModelSource source(model, &encoder, level);
    const auto report = evaluate(source, labelled, eval);
    rows.push_back({provider, level, report.success("train"), report.per_split.front().rollouts});
  }
  return rows;
}

std::vector<std::string> paraphrase_corpus(std::span<const TaskSpec> tasks, std::span<const Level> levels,
                                           std::span<const std::uint64_t> seeds) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (Level level : levels) {
    for (const auto& t : tasks) {
      for (auto seed : seeds) {
        std::string d = level == Level::L0
                            ? canonical_description(t)
                            : sample_description(t, level, Rng::derive(seed, {io::fnv1a64(t.id), 0xde5cULL}));
        if (seen.insert(d).second) out.push_back(std::move(d));
      }
    }
  }
  return out;
}

std::vector<std::string> paraphrase_order_violations(std::span<const ParaphraseRow> rows, double band) {
  std::map<std::string, std::map<Level, double>> by_provider;
  for (const auto& r : rows) by_provider[r.provider][r.level] = r.success;
  std::vector<std::string> out;
  for (const auto& [provider, levels] : by_provider) {
    const Level order[] = {Level::L0, Level::L1, Level::L2};
    for (int i = 0; i + 1 < 3; ++i) {
      const auto hi = levels.find(order[i]);
      const auto lo = levels.find(order[i + 1]);
      if (hi == levels.end() || lo == levels.end()) continue;
      if (lo->second > hi->second + band) {
        out.push_back(provider + ": " + std::string(to_string(lo->first)) + " " + fmt("%.3f", lo->second) +
                      " exceeds " + std::string(to_string(hi->first)) + " " + fmt("%.3f", hi->second));
      }
    }
  }
  return out;
}

std::string paraphrase_csv(std::span<const ParaphraseRow> rows) {
  std::string out = "provider,level,success,rollouts\n";
  for (const auto& r : rows) {
    out += r.provider + "," + std::string(to_string(r.level)) + "," + fmt("%.6f", r.success) + "," +
           std::to_string(r.rollouts) + "\n";
  }
  return out;
}

nlohmann::json paraphrase_json(std::span<const ParaphraseRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"provider", r.provider},
                   {"level", to_string(r.level)},
                   {"success", r.success},
                   {"rollouts", r.rollouts}});
  }
  return {{"format", "tenet-paraphrase-table"}, {"version", 1}, {"rows", out}};
}

// ---- learner comparison ---------------------------------------------------

std::vector<LearnerSpec> default_learners() {
  return {{"tenet-direct", ModelKind::tenet, Variant::direct, std::nullopt},
          {"tenet-contrastive", ModelKind::tenet, Variant::contrastive, std::nullopt},
          {"traj-hn", ModelKind::traj_hn, Variant::direct, std::nullopt},
          {"prompt-concat", ModelKind::prompt_concat, Variant::direct, 8},
          {"bc-shared", ModelKind::bc_shared, Variant::direct, 8}};
}

std::vector<LearnerResult> compare_learners(const BaselineOptions& options, const OfflineDataset& dataset,
                                            const TextEncoder& encoder, const ProgressFn& progress) {
  if (options.learners.empty()) throw ConfigError("no learners to compare");
  if (options.seeds.empty()) throw ConfigError("learner comparison needs at least one seed");
  std::set<std::string> names;
  for (const auto& l : options.learners) {
    if (!names.insert(l.name).second) throw ConfigError("duplicate learner name '" + l.name + "'");
  }
  const auto specs = dataset.task_specs();
  const auto tasks = label_tasks(specs, "train");
  std::vector<LearnerResult> results;
  for (const auto& learner : options.learners) {
    ModelConfig mc = options.model;
    mc.kind = learner.kind;
    mc.variant = learner.variant;
    TrainConfig tc = options.train;
    if (learner.bc_transitions) tc.bc_transitions = *learner.bc_transitions;
    for (auto seed : options.seeds) {
      say(progress, "learners: " + learner.name + " seed " + std::to_string(seed));
      auto trained = fit(mc, tc, seed, dataset, specs, encoder, {{"learner", learner.name}});
      const TenetModel& model = trained.checkpoint.model;
      const EvalOptions eval{options.n_rollouts, {seed}};
      PromptProvider prompts;
      if (needs_prompt(learner.kind)) prompts = expert_prompts();
      const ModelSource source(model, &encoder, Level::L0, prompts);
      LearnerResult r{learner.name, seed, model.trainable_count(), ndiff::count_params(model.policy_manifest()),
                      evaluate(source, tasks, eval), std::nullopt};
      say(progress, "learners: " + learner.name + " seed " + std::to_string(seed) + " success " +
                        fmt("%.3f", r.report.success("train")));
      if (learner.kind == ModelKind::traj_hn && options.wrong_prompt_probe) {
        const ModelSource wrong(model, &encoder, Level::L0, wrong_task_prompts(expert_prompts(), specs));
        LearnerResult w{learner.name + "/wrong-prompt", seed, r.trainable_params, r.controller_params,
                        evaluate(wrong, tasks, eval), std::nullopt};
        results.push_back(std::move(r));
        results.push_back(std::move(w));
      } else {
        results.push_back(std::move(r));
      }
      if (options.keep_checkpoints) {
        auto& slot = results.back().learner == learner.name ? results.back() : results[results.size() - 2];
        slot.checkpoint = std::move(trained.checkpoint);
      }
    }
  }
  return results;
}

double mean_success(std::span<const LearnerResult> results, const std::string& learner) {
  std::vector<double> xs;
  for (const auto& r : results) {
    if (r.learner == learner) xs.push_back(r.report.success("train"));
  }
  if (xs.empty()) throw ConfigError("no results for learner '" + learner + "'");
  return mean_std(xs).first;
}

double mean_task_success(std::span<const LearnerResult> results, const std::string& learner,
                         const std::string& task_id) {
  std::vector<double> xs;
  for (const auto& r : results) {
    if (r.learner != learner) continue;
    for (const auto& t : r.report.per_task) {
      if (t.name == task_id) xs.push_back(t.success_rate);
    }
  }
  if (xs.empty()) throw ConfigError("no results for learner '" + learner + "' on task '" + task_id + "'");
  return mean_std(xs).first;
}

std::string learners_csv(std::span<const LearnerResult> results) {
  std::string out = "learner,seed,trainable_params,controller_params,rollouts,success\n";
  for (const auto& r : results) {
    out += r.learner + "," + std::to_string(r.seed) + "," + std::to_string(r.trainable_params) + "," +
           std::to_string(r.controller_params) + "," + std::to_string(r.report.per_split.front().rollouts) + "," +
           fmt("%.6f", r.report.success("train")) + "\n";
  }
  return out;
}

nlohmann::json learners_json(std::span<const LearnerResult> results) {
  nlohmann::json rows = nlohmann::json::array();
  std::vector<std::string> order;
  for (const auto& r : results) {
    rows.push_back({{"learner", r.learner},
                    {"seed", r.seed},
                    {"trainable_params", r.trainable_params},
                    {"controller_params", r.controller_params},
                    {"report", r.report.to_json()}});
    if (std::find(order.begin(), order.end(), r.learner) == order.end()) order.push_back(r.learner);
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : order) summary.push_back({{"learner", name}, {"mean_success", mean_success(results, name)}});
  return {{"format", "tenet-learner-comparison"}, {"version", 1}, {"summary", summary}, {"rows", rows}};
}

}  // namespace tenet
