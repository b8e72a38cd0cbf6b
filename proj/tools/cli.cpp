#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "tenet/data/dataset.hpp"
#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"
#include "tenet/io/controller_file.hpp"
#include "tenet/io/reports.hpp"
#include "tenet/io/run_config.hpp"
#include "tenet/model/checkpoint.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/rng.hpp"
#include "tenet/train/bench.hpp"
#include "tenet/train/evaluate.hpp"
#include "tenet/train/experiments.hpp"
#include "tenet/train/policy_source.hpp"
#include "tenet/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tenet::cli {

namespace {

// Flags shared by every command.
struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "Run config JSON file");
  cmd->add_option("--set", c.sets, "Override a config value: dotted.key=value (repeatable)");
  cmd->add_option("-o,--out", c.out, "Output directory (overrides config 'output')");
}

// "a.b.c=v" -> {"a": {"b": {"c": v}}}; v is parsed as JSON when possible.
json parse_set(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
  const std::string key = s.substr(0, eq);
  const std::string raw = s.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  std::vector<std::string> path;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) path.push_back(part);
  for (auto it = path.rbegin(); it != path.rend(); ++it) value = json{{*it, value}};
  return value;
}

// Precedence: base < config file < --set < command flags.
io::RunConfig resolve(const Common& c, const json& flags, json base = json::object()) {
  if (!c.config.empty()) {
    if (!fs::exists(c.config)) throw ConfigError("config file " + c.config + " does not exist");
    try {
      base = io::merge_patch(base, json::parse(io::read_file(c.config)));
    } catch (const json::parse_error& e) {
      throw ConfigError(c.config + ": " + e.what());
    }
  }
  for (const auto& s : c.sets) base = io::merge_patch(base, parse_set(s));
  base = io::merge_patch(base, flags);
  if (!c.out.empty()) base["output"] = c.out;
  return io::RunConfig::from_json(base);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& p : split_list(s)) {
    try {
      out.push_back(std::stoi(p));
    } catch (const std::exception&) {
      throw ConfigError("expected an integer list, got '" + s + "'");
    }
  }
  return out;
}

// Train and test tasks of the configured registry. Families without a split
// rule and no holdout fraction train on every task.
TaskSplit task_split(const io::RunConfig& cfg) {
  const auto tasks = io::registry_of(cfg);
  if (cfg.split.holdout_fraction || suite_family(cfg.suite) == Family::vel_track_1d) {
    return io::split_of(cfg, tasks);
  }
  return {tasks, {}};
}

std::vector<EvalTask> eval_tasks(const io::RunConfig& cfg) {
  const auto split = task_split(cfg);
  auto out = label_tasks(split.train, "train");
  for (auto& t : label_tasks(split.test, "test")) out.push_back(std::move(t));
  if (suite_family(cfg.suite) == Family::vel_track_1d) out.push_back({vel_track_task(kVelTrackOodTarget), "ood"});
  return out;
}

fs::path out_dir(const io::RunConfig& cfg) { return fs::path(cfg.output); }

// The part of a run config a dataset is a function of.
json data_config(const io::RunConfig& cfg) {
  const json j = cfg.to_json();
  json out = json::object();
  for (const char* key : {"suite", "task_count", "registry_seed", "split", "dataset"}) out[key] = j.at(key);
  return out;
}

void write_config(const fs::path& dir, const io::RunConfig& cfg) {
  json j = cfg.to_json();
  j["config_hash"] = cfg.hash();
  io::write_json(dir / "config.json", j);
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int n) {
  if (n < 1) throw ConfigError("need at least one seed");
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
  return out;
}

OfflineDataset load_checked_dataset(const fs::path& dir, const io::RunConfig& cfg, bool missing_is_config) {
  if (!fs::exists(dir / "manifest.json")) {
    const std::string msg = "dataset " + dir.string() + " does not exist; create it with `tenet gen`";
    if (missing_is_config) throw ConfigError(msg);
    throw MissingArtifactError(msg);
  }
  auto ds = load_dataset(dir);
  const auto recorded = ds.provenance.value("config_hash", std::string());
  if (recorded != cfg.data_hash()) {
    throw ConfigError("dataset " + dir.string() + " was generated from a different registry/dataset config (" +
                      recorded + " vs " + cfg.data_hash() + ")");
  }
  return ds;
}

Checkpoint load_checked_checkpoint(const fs::path& path) {
  io::require_artifact(path, "train");
  return load_checkpoint(path);
}

void print_eval(std::ostream& out, const EvalReport& r) {
  for (const auto& s : r.per_split) {
    out << std::left << std::setw(8) << s.split << " tasks " << s.tasks << "  rollouts " << s.rollouts
        << "  success " << std::fixed << std::setprecision(3) << s.success_rate << "  return " << s.mean_return
        << " +- " << s.std_return << "\n";
  }
  if (r.failed_rollouts() > 0) out << "warning: " << r.failed_rollouts() << " rollouts had non-finite actions\n";
}

// ---- gen --------------------------------------------------------------

struct GenArgs {
  Common c;
  std::string suite;
  std::optional<int> count;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> registry_seed;
  std::optional<int> k;
  std::optional<int> m;
  std::string levels;
  std::optional<double> holdout;
  std::string dataset;
  bool force = false;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  if (!a.suite.empty()) flags["suite"] = a.suite;
  if (a.count) flags["task_count"] = *a.count;
  if (a.registry_seed) flags["registry_seed"] = *a.registry_seed;
  if (a.seed) flags["dataset"]["seed"] = *a.seed;
  if (a.k) flags["dataset"]["K"] = *a.k;
  if (a.m) flags["dataset"]["M"] = *a.m;
  if (!a.levels.empty()) flags["dataset"]["levels"] = split_list(a.levels);
  if (a.holdout) flags["split"]["holdout_fraction"] = *a.holdout;
  const auto cfg = resolve(a.c, flags);
  const fs::path dir = a.dataset.empty() ? out_dir(cfg) / "dataset" : fs::path(a.dataset);
  if (fs::exists(dir) && !fs::is_empty(dir) && !a.force) {
    throw ConfigError(dir.string() + " is not empty; pass --force to overwrite");
  }
  const auto split = task_split(cfg);
  err << "gen: " << split.train.size() << " train tasks, expert gate over " << cfg.dataset.gate_rollouts
      << " rollouts each\n";
  auto ds = generate_dataset(split.train, cfg.dataset, cfg.suite);
  ds.provenance["config_hash"] = cfg.data_hash();
  ds.provenance["data_config"] = data_config(cfg);
  save_dataset(ds, dir, a.force);
  write_config(dir, cfg);
  std::size_t transitions = 0;
  for (const auto& t : ds.tasks) transitions += t.transition_count();
  out << "dataset " << dir.string() << ": " << ds.tasks.size() << " tasks, K=" << cfg.dataset.trajectories_per_task
      << ", M=" << cfg.dataset.descriptions_per_level << ", " << transitions << " transitions, hash " << ds.hash()
      << "\n";
  return kOk;
}

// ---- train ------------------------------------------------------------

struct TrainArgs {
  Common c;
  std::string dataset;
  std::string kind;
  std::string variant;
  std::optional<std::int64_t> steps;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<int> batch;
  std::optional<double> lambda_g;
  std::optional<double> beta;
  std::string resume;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  if (!a.kind.empty()) flags["model"]["kind"] = a.kind;
  if (!a.variant.empty()) flags["model"]["variant"] = a.variant;
  if (a.lambda_g) flags["model"]["lambda_g"] = *a.lambda_g;
  if (a.beta) flags["model"]["beta"] = *a.beta;
  if (a.steps) flags["train"]["steps"] = *a.steps;
  if (a.lr) flags["train"]["lr"] = *a.lr;
  if (a.seed) flags["train"]["seed"] = *a.seed;
  if (a.batch) flags["train"]["batch_tasks"] = *a.batch;
  // Without a config file the data settings come from the dataset itself.
  const auto probe = resolve(a.c, flags);
  const fs::path ds_dir = a.dataset.empty() ? out_dir(probe) / "dataset" : fs::path(a.dataset);
  json base = json::object();
  if (a.c.config.empty() && fs::exists(ds_dir / "manifest.json")) {
    base = io::read_json(ds_dir / "manifest.json", "gen").value("provenance", json::object()).value("data_config", json::object());
  }
  const auto cfg = resolve(a.c, flags, base);
  const fs::path dir = out_dir(cfg);
  const auto ds = load_checked_dataset(ds_dir, cfg, true);
  const auto encoder = io::make_encoder(cfg.provider);

  TrainRequest req;
  req.model = cfg.model;
  req.train = cfg.train;
  for (const auto& t : task_split(cfg).train) {
    if (!ds.contains(t.id)) throw ConfigError("dataset lacks train task '" + t.id + "'");
    req.train_ids.push_back(t.id);
  }
  req.meta = {{"config_hash", cfg.model_hash()}, {"run_config", cfg.to_json()}};
  if (!a.resume.empty()) req.resume = load_checked_checkpoint(a.resume);
  req.on_log = [&err](const LossRecord& r) {
    err << "step " << r.step << "  total " << r.loss.total << "  bc " << r.loss.bc << "  align " << r.loss.align
        << "  text_traj " << r.loss.text_traj << "  text_text " << r.loss.text_text << "\n";
  };
  fs::create_directories(dir);
  write_config(dir, cfg);
  try {
    const auto result = train(req, ds, *encoder);
    save_checkpoint(result.checkpoint, dir / "model.tnck");
    io::write_text(dir / "loss.csv", loss_log_csv(result.log));
    out << "checkpoint " << (dir / "model.tnck").string() << " after " << result.checkpoint.step << " steps ("
        << result.checkpoint.model.trainable_count() << " trainable parameters)\n";
  } catch (const TrainingAborted& e) {
    save_checkpoint(e.last_good(), dir / "model.last_good.tnck");
    err << "training aborted at step " << e.step() << ": " << e.what() << "\nlast good parameters saved to "
        << (dir / "model.last_good.tnck").string() << "\n";
    return kNumericAbort;
  }
  return kOk;
}

// ---- eval -------------------------------------------------------------

struct EvalArgs {
  Common c;
  std::string checkpoint;
  std::string controller;
  bool expert = false;
  std::optional<int> rollouts;
  std::optional<int> seeds;
  std::string level = "L0";
  std::string prompts = "none";
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  if (a.rollouts) flags["eval"]["rollouts"] = *a.rollouts;
  if (a.seeds) flags["eval"]["seeds"] = seed_range(0, *a.seeds);

  std::optional<Checkpoint> ckpt;
  json base = json::object();
  const bool use_model = !a.expert && a.controller.empty();
  if (use_model) {
    const fs::path path = !a.checkpoint.empty() ? fs::path(a.checkpoint) : [&] {
      const auto probe = resolve(a.c, flags);
      return out_dir(probe) / "model.tnck";
    }();
    ckpt = load_checked_checkpoint(path);
    if (a.c.config.empty()) base = ckpt->meta.value("run_config", json::object());
  }
  const auto cfg = resolve(a.c, flags, base);
  if (ckpt) io::require_config_hash(ckpt->meta, cfg.model_hash(), "checkpoint");
  const EvalOptions options{cfg.eval.rollouts, cfg.eval.seeds};
  const fs::path dir = out_dir(cfg) / "eval";

  EvalReport report;
  if (a.expert) {
    report = evaluate(ExpertSource(), eval_tasks(cfg), options, cfg.hash());
  } else if (!a.controller.empty()) {
    io::require_artifact(a.controller, "instantiate --save");
    auto file = io::load_controller(a.controller);
    auto tasks = eval_tasks(cfg);
    const auto task_id = file.info.value("task_id", std::string());
    if (!task_id.empty()) {
      std::erase_if(tasks, [&](const EvalTask& t) { return t.task.id != task_id; });
      if (tasks.empty()) throw ConfigError("controller task '" + task_id + "' is not in the configured registry");
    }
    report = evaluate(ControllerSource(std::move(file.params)), tasks, options, cfg.hash());
  } else {
    const auto encoder = io::make_encoder(cfg.provider);
    PromptProvider prompts;
    if (a.prompts == "expert") {
      prompts = expert_prompts();
    } else if (a.prompts == "wrong") {
      prompts = wrong_task_prompts(expert_prompts(), io::registry_of(cfg));
    } else if (a.prompts != "none") {
      throw ConfigError("--prompts must be none, expert or wrong");
    }
    const ModelSource source(ckpt->model, encoder.get(), level_from_string(a.level), prompts);
    report = evaluate(source, eval_tasks(cfg), options, cfg.hash());
  }
  io::write_report(dir, "eval_report", report.to_json(), report.to_csv(), cfg.hash());
  write_config(dir, cfg);
  err << "report written to " << (dir / "eval_report.json").string() << "\n";
  out << report.policy << "\n";
  print_eval(out, report);
  return kOk;
}

// ---- bench ------------------------------------------------------------

struct BenchArgs {
  Common c;
  std::string controller;
  std::string checkpoint;
  std::string text;
  std::string hidden;
  int iterations = 100000;
  std::string precision = "f64";
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve(a.c, json::object());
  ndiff::ParamVec policy;
  double inst_ms = -1.0;
  std::string source;
  if (!a.controller.empty()) {
    io::require_artifact(a.controller, "instantiate --save");
    policy = io::load_controller(a.controller).params;
    source = a.controller;
  } else if (!a.checkpoint.empty()) {
    const auto ckpt = load_checked_checkpoint(a.checkpoint);
    io::RunConfig run = io::RunConfig::from_json(ckpt.meta.value("run_config", json::object()));
    const auto encoder = io::make_encoder(run.provider);
    std::string text = a.text;
    if (text.empty()) {
      const auto tasks = io::registry_of(run);
      text = canonical_description(tasks.front());
    }
    policy = instantiate(ckpt, text, *encoder);
    inst_ms = instantiation_ms(ckpt.model, text, *encoder);
    source = a.checkpoint;
  } else {
    ModelConfig mc = cfg.model;
    if (!a.hidden.empty()) mc.policy_hidden = int_list(a.hidden);
    policy = ndiff::ParamVec::zeros(policy_manifest(mc));
    Rng rng(cfg.train.seed);
    ndiff::glorot_init(policy, rng);
    source = "random " + std::to_string(mc.state_dim) + "->" + a.hidden + "->" + std::to_string(mc.action_dim);
  }
  std::vector<Precision> precisions;
  if (a.precision == "both") {
    precisions = {Precision::f64, Precision::f32};
  } else {
    precisions = {precision_from_string(a.precision)};
  }
  const fs::path dir = out_dir(cfg) / "bench";
  for (auto p : precisions) {
    auto report = bench_controller(policy, a.iterations, p);
    report.instantiate_ms = inst_ms;
    auto j = report.to_json();
    j["source"] = source;
    io::write_report(dir, "bench_" + std::string(to_string(p)), j, report.to_csv(), cfg.hash());
    out << to_string(p) << ": " << report.param_count << " params, median " << std::fixed << std::setprecision(1)
        << report.median_ns << " ns, p99 " << report.p99_ns << " ns, " << std::setprecision(0) << report.hz
        << " Hz (sustained " << report.sustained_hz << " Hz)";
    if (inst_ms >= 0.0) out << ", instantiation " << std::setprecision(3) << inst_ms << " ms";
    out << "\n";
  }
  write_config(dir, cfg);
  err << "reports written to " << dir.string() << "\n";
  return kOk;
}

// ---- instantiate ------------------------------------------------------

struct InstArgs {
  Common c;
  std::string checkpoint;
  std::string text;
  std::string task;
  std::string save;
};

int cmd_instantiate(const InstArgs& a, std::ostream& out, std::ostream&) {
  const auto probe = resolve(a.c, json::object());
  const fs::path path = a.checkpoint.empty() ? out_dir(probe) / "model.tnck" : fs::path(a.checkpoint);
  const auto ckpt = load_checked_checkpoint(path);
  const json base = a.c.config.empty() ? ckpt.meta.value("run_config", json::object()) : json::object();
  const auto cfg = resolve(a.c, json::object(), base);
  io::require_config_hash(ckpt.meta, cfg.model_hash(), "checkpoint");
  if (a.text.empty() == a.task.empty()) throw ConfigError("pass exactly one of --text or --task");
  std::string text = a.text;
  std::string task_id;
  if (!a.task.empty()) {
    for (const auto& t : io::registry_of(cfg)) {
      if (t.id == a.task) text = canonical_description(t), task_id = t.id;
    }
    if (task_id.empty()) throw ConfigError("unknown task '" + a.task + "'");
  }
  const auto encoder = io::make_encoder(cfg.provider);
  const auto params = instantiate(ckpt, text, *encoder);
  out << "description: " << text << "\n";
  out << "controller: " << params.size() << " parameters, L2 norm " << std::setprecision(6)
      << params.values().norm() << "\n";
  for (const auto& l : params.manifest()) {
    out << "  " << l.name << ": " << l.in << " -> " << l.out << " " << ndiff::to_string(l.activation) << "\n";
  }
  if (!a.save.empty()) {
    json info = {{"description", text}, {"config_hash", cfg.model_hash()}, {"encoder", encoder->fingerprint()},
                 {"checkpoint", path.string()}};
    if (!task_id.empty()) info["task_id"] = task_id;
    io::save_controller({params, info}, a.save);
    out << "saved " << a.save << "\n";
  }
  return kOk;
}

// ---- experiment -------------------------------------------------------

struct ExpArgs {
  Common c;
  std::string name;
  std::optional<int> seeds;
  std::optional<std::int64_t> steps;
  std::string sizes = "25,50,100,200";
  std::string table;
  std::string export_corpus;
};

void save_result_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  fs::create_directories(path.parent_path());
  save_checkpoint(ckpt, path);
}

int cmd_experiment(const ExpArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  if (a.steps) flags["train"]["steps"] = *a.steps;
  if (a.name == "velocity") flags["suite"] = "veltrack";
  const auto cfg = resolve(a.c, flags, a.name == "scaling" ? json{{"suite", "pointgoal2d"}, {"task_count", 50}}
                                                             : json::object());
  const fs::path dir = out_dir(cfg) / "experiments" / a.name;
  const auto progress = [&err](const std::string& s) { err << s << "\n"; };
  const auto encoder = io::make_encoder(cfg.provider);
  const auto train_seeds = seed_range(cfg.train.seed, a.seeds.value_or(3));

  if (a.name == "velocity") {
    const auto split = task_split(cfg);
    const auto ds = generate_dataset(split.train, cfg.dataset, cfg.suite);
    progress("velocity: training on " + std::to_string(split.train.size()) + " targets");
    const auto result = fit(cfg.model, cfg.train, cfg.train.seed, ds, split.train, *encoder,
                            {{"config_hash", cfg.model_hash()}, {"run_config", cfg.to_json()}});
    const ModelSource source(result.checkpoint.model, encoder.get());
    const auto targets = velocity_study_targets();
    const auto curve = velocity_alignment(source, targets, cfg.eval.rollouts, cfg.eval.seeds.front());
    save_result_checkpoint(dir / "model.tnck", result.checkpoint);
    io::write_report(dir, "velocity", velocity_json(curve), velocity_csv(curve), cfg.hash());
    out << "instructed  achieved\n";
    for (const auto& p : curve) {
      out << std::fixed << std::setprecision(3) << std::setw(10) << p.instructed << "  " << p.achieved_mean
          << " +- " << p.achieved_std << (p.out_of_range ? "  (out of range)" : "") << "\n";
    }
  } else if (a.name == "scaling") {
    ScalingOptions o;
    o.sizes = int_list(a.sizes);
    o.holdout_fraction = cfg.split.holdout_fraction.value_or(0.1);
    o.registry_seed = cfg.registry_seed;
    o.split_seed = cfg.split.seed;
    o.seeds = train_seeds;
    o.n_rollouts = cfg.eval.rollouts;
    o.model = cfg.model;
    o.train = cfg.train;
    o.dataset = cfg.dataset;
    const auto rows = task_scaling(o, *encoder, progress);
    io::write_report(dir, "scaling", scaling_json(rows), scaling_csv(rows), cfg.hash());
    out << scaling_csv(rows);
  } else if (a.name == "paraphrase") {
    const auto tasks = task_split(cfg).train;
    const std::vector<Level> levels{Level::L0, Level::L1, Level::L2};
    if (!a.export_corpus.empty()) {
      std::string text;
      for (const auto& s : paraphrase_corpus(tasks, levels, cfg.eval.seeds)) text += s + "\n";
      io::write_text(a.export_corpus, text);
      out << "corpus written to " << a.export_corpus << "\n";
      return kOk;
    }
    TrainConfig tc = cfg.train;
    if (tc.levels != std::vector<Level>{Level::L0}) throw ConfigError("paraphrase study trains on L0 only");
    const auto ds = generate_dataset(tasks, cfg.dataset, cfg.suite);
    const EvalOptions eval{cfg.eval.rollouts, cfg.eval.seeds};
    std::vector<ParaphraseRow> rows;
    std::vector<std::pair<std::string, std::unique_ptr<TextEncoder>>> providers;
    providers.emplace_back("hash", io::make_encoder(cfg.provider));
    if (!a.table.empty()) {
      io::require_artifact(a.table, "experiment paraphrase --export-corpus (then embed the corpus)");
      providers.emplace_back("table", std::make_unique<EmbeddingTable>(EmbeddingTable::load(a.table)));
    }
    for (const auto& [name, enc] : providers) {
      progress("paraphrase: training with the " + name + " provider");
      const auto result = fit(cfg.model, tc, cfg.train.seed, ds, tasks, *enc);
      save_result_checkpoint(dir / name / "model.tnck", result.checkpoint);
      for (auto& r : paraphrase_eval(result.checkpoint.model, *enc, name, tasks, levels, eval)) rows.push_back(r);
    }
    auto j = paraphrase_json(rows);
    j["order_violations"] = paraphrase_order_violations(rows, 0.0);
    io::write_report(dir, "paraphrase", j, paraphrase_csv(rows), cfg.hash());
    out << paraphrase_csv(rows);
    for (const auto& v : j["order_violations"]) out << "ordering violated: " << v.get<std::string>() << "\n";
  } else if (a.name == "baselines") {
    const auto tasks = task_split(cfg).train;
    const auto ds = generate_dataset(tasks, cfg.dataset, cfg.suite);
    BaselineOptions o;
    o.seeds = train_seeds;
    o.n_rollouts = cfg.eval.rollouts;
    o.model = cfg.model;
    o.train = cfg.train;
    o.keep_checkpoints = true;
    auto results = compare_learners(o, ds, *encoder, progress);
    for (auto& r : results) {
      if (!r.checkpoint) continue;
      save_result_checkpoint(dir / r.learner / ("seed" + std::to_string(r.seed) + ".tnck"), *r.checkpoint);
      r.checkpoint.reset();
    }
    io::write_report(dir, "learners", learners_json(results), learners_csv(results), cfg.hash());
    for (const auto& s : learners_json(results)["summary"]) {
      out << std::left << std::setw(24) << s["learner"].get<std::string>() << std::fixed << std::setprecision(3)
          << s["mean_success"].get<double>() << "\n";
    }
  } else {
    throw ConfigError("unknown experiment '" + a.name + "'");
  }
  write_config(dir, cfg);
  err << "reports written to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text-conditioned hypernetwork policies: data, training, evaluation and benchmarks", "tenet"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an offline expert dataset");
  add_common(g, gen.c);
  g->add_option("--family,--suite", gen.suite, "Task suite: veltrack, switchworld10, switchworld50, pointgoal2d");
  g->add_option("--count", gen.count, "Number of tasks (pointgoal2d)");
  g->add_option("--seed", gen.seed, "Dataset seed");
  g->add_option("--registry-seed", gen.registry_seed, "Registry seed (pointgoal2d goal placement)");
  g->add_option("-K,--trajectories", gen.k, "Expert trajectories per task");
  g->add_option("-M,--descriptions", gen.m, "Descriptions per level per task");
  g->add_option("--levels", gen.levels, "Comma-separated description levels, e.g. L0,L1");
  g->add_option("--holdout", gen.holdout, "Held-out task fraction");
  g->add_option("--dataset", gen.dataset, "Dataset directory (default <out>/dataset)");
  g->add_flag("--force", gen.force, "Overwrite an existing dataset directory");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a learner on a generated dataset");
  add_common(t, tr.c);
  t->add_option("--dataset", tr.dataset, "Dataset directory (default <out>/dataset)");
  t->add_option("--kind", tr.kind, "tenet, bc-shared, traj-hn or prompt-concat");
  t->add_option("--variant", tr.variant, "direct, mse or contrastive");
  t->add_option("--steps", tr.steps, "Adam steps");
  t->add_option("--lr", tr.lr, "Learning rate");
  t->add_option("--seed", tr.seed, "Training seed");
  t->add_option("--batch", tr.batch, "Tasks per step (0: min(32, tasks))");
  t->add_option("--lambda", tr.lambda_g, "Grounding weight");
  t->add_option("--beta", tr.beta, "Contrastive temperature");
  t->add_option("--resume", tr.resume, "Continue from this checkpoint");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint, a controller file or the experts");
  add_common(e, ev.c);
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint (default <out>/model.tnck)");
  e->add_option("--controller", ev.controller, "Standalone controller file");
  e->add_flag("--expert", ev.expert, "Evaluate the scripted experts");
  e->add_option("--rollouts", ev.rollouts, "Rollouts per task per seed");
  e->add_option("--seeds", ev.seeds, "Number of evaluation seeds (0, 1, ...)");
  e->add_option("--level", ev.level, "Description level TeNet is instantiated from");
  e->add_option("--prompts", ev.prompts, "Prompt trajectories for prompt learners: none, expert or wrong");

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "Time single-state controller forward passes");
  add_common(b, be.c);
  b->add_option("--controller", be.controller, "Standalone controller file");
  b->add_option("--checkpoint", be.checkpoint, "Instantiate from this checkpoint (also times instantiation)");
  b->add_option("--text", be.text, "Description to instantiate from");
  b->add_option("--hidden", be.hidden, "Hidden widths of a random controller, e.g. 128,128");
  b->add_option("--iterations", be.iterations, "Timed forward passes (>= 10000)");
  b->add_option("--precision", be.precision, "f64, f32 or both");

  InstArgs in;
  auto* i = app.add_subcommand("instantiate", "Build a controller from text and optionally save it");
  add_common(i, in.c);
  i->add_option("--checkpoint", in.checkpoint, "Checkpoint (default <out>/model.tnck)");
  i->add_option("--text", in.text, "Task description");
  i->add_option("--task", in.task, "Use the canonical description of this task id");
  i->add_option("--save", in.save, "Write a standalone controller file");

  ExpArgs ex;
  auto* x = app.add_subcommand("experiment", "Run a multi-train experiment recipe end to end");
  add_common(x, ex.c);
  x->add_option("name", ex.name, "scaling, paraphrase, velocity or baselines")
      ->required()
      ->check(CLI::IsMember({"scaling", "paraphrase", "velocity", "baselines"}));
  x->add_option("--seeds", ex.seeds, "Training seeds per configuration");
  x->add_option("--steps", ex.steps, "Adam steps per training");
  x->add_option("--sizes", ex.sizes, "Registry sizes for scaling, ascending");
  x->add_option("--table", ex.table, "Embedding table compared against the hash provider (paraphrase)");
  x->add_option("--export-corpus", ex.export_corpus, "Write the paraphrase corpus and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out, err);
    if (t->parsed()) return cmd_train(tr, out, err);
    if (e->parsed()) return cmd_eval(ev, out, err);
    if (b->parsed()) return cmd_bench(be, out, err);
    if (i->parsed()) return cmd_instantiate(in, out, err);
    if (x->parsed()) return cmd_experiment(ex, out, err);
  } catch (const ExpertGateError& ge) {
    err << "error: " << ge.what() << "\n";
    for (const auto& id : ge.failing()) err << "  failing task: " << id << "\n";
    return kGateFailure;
  } catch (const NumericError& ne) {
    err << "error: " << ne.what() << "\n";
    return kNumericAbort;
  } catch (const MissingArtifactError& me) {
    err << "error: " << me.what() << "\n";
    return kMissingArtifact;
  } catch (const MissingPromptError& mp) {
    err << "error: " << mp.what() << " (pass --prompts expert to supply one)\n";
    return kMissingArtifact;
  } catch (const ConfigError& ce) {
    err << "config error: " << ce.what() << "\n";
    return kConfigError;
  } catch (const InputError& ie) {
    err << "input error: " << ie.what() << "\n";
    return kConfigError;
  } catch (const ShapeError& se) {
    err << "shape error: " << se.what() << "\n";
    return kConfigError;
  } catch (const LookupError& le) {
    err << "lookup error: " << le.what() << "\n";
    return kConfigError;
  } catch (const std::exception& ex2) {
    err << "error: " << ex2.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace tenet::cli
