#include <doctest.h>

#include <cmath>
#include <vector>

#include "temp_dir.hpp"
#include "tenet/data/dataset.hpp"
#include "tenet/envs/descriptions.hpp"
#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/error.hpp"
#include "tenet/io/controller_file.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/rng.hpp"
#include "tenet/train/bench.hpp"
#include "tenet/train/experiments.hpp"

using namespace tenet;

namespace {

ModelConfig tiny_model(Variant v = Variant::contrastive) {
  ModelConfig c;
  c.variant = v;
  c.d_e = 8;
  c.g_hidden = {16};
  c.h_hidden = {16};
  c.policy_hidden = {8};
  c.traj_feature_dim = 8;
  c.traj_head_hidden = {8};
  return c;
}

TrainConfig tiny_train(std::int64_t steps) {
  TrainConfig t;
  t.steps = steps;
  t.lr = 1e-3;
  t.bc_transitions = 16;
  t.log_every = 1;
  return t;
}

const OfflineDataset& small_dataset() {
  static const OfflineDataset d = [] {
    DatasetOptions o;
    o.trajectories_per_task = 3;
    o.descriptions_per_level = 2;
    o.gate_rollouts = 5;
    return generate_dataset(task_registry("pointgoal2d", 6, 1), o, "pointgoal2d");
  }();
  return d;
}

TrainResult fit_small(std::int64_t steps, std::uint64_t seed, Variant v = Variant::contrastive) {
  const HashEmbedder enc(64);
  const auto tasks = small_dataset().task_specs();
  return fit(tiny_model(v), tiny_train(steps), seed, small_dataset(), tasks, enc);
}

}  // namespace

TEST_CASE("zero training steps return the initialization") {
  const auto r = fit_small(0, 5);
  auto c = tiny_model();
  c.d_z = 64;
  CHECK(r.checkpoint.model == TenetModel::initialize(c, 5));
  CHECK(r.checkpoint.step == 0);
}

TEST_CASE("training is deterministic in the seed") {
  const auto a = fit_small(6, 2);
  const auto b = fit_small(6, 2);
  const auto c = fit_small(6, 3);
  CHECK(a.checkpoint.model == b.checkpoint.model);
  CHECK(a.log.size() == b.log.size());
  CHECK(a.log.back().loss.total == b.log.back().loss.total);
  CHECK_FALSE(a.checkpoint.model == c.checkpoint.model);
}

TEST_CASE("training touches no environment") {
  (void)small_dataset();
  reset_env_step_count();
  (void)fit_small(4, 0);
  CHECK(env_step_count() == 0);
}

TEST_CASE("resuming matches an uninterrupted run") {
  const HashEmbedder enc(64);
  const auto tasks = small_dataset().task_specs();
  const auto full = fit(tiny_model(), tiny_train(8), 4, small_dataset(), tasks, enc);
  const auto half = fit(tiny_model(), tiny_train(3), 4, small_dataset(), tasks, enc);

  TrainRequest req;
  req.model = half.checkpoint.model.config();
  req.train = tiny_train(8);
  req.train.seed = 4;
  for (const auto& t : tasks) req.train_ids.push_back(t.id);
  req.resume = half.checkpoint;
  const auto resumed = train(req, small_dataset(), enc);
  CHECK(resumed.checkpoint.model == full.checkpoint.model);
  CHECK(resumed.checkpoint.step == 8);
}

TEST_CASE("the loss goes down on a tiny problem") {
  const auto r = fit_small(200, 1, Variant::direct);
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 20; ++i) {
    first += r.log[static_cast<std::size_t>(i)].loss.bc;
    last += r.log[r.log.size() - 1 - static_cast<std::size_t>(i)].loss.bc;
  }
  CHECK(last < 0.8 * first);
}

TEST_CASE("a numeric blow-up aborts with the last good parameters") {
  const HashEmbedder enc(64);
  const auto tasks = small_dataset().task_specs();
  auto t = tiny_train(20);
  t.lr = 1e200;
  try {
    (void)fit(tiny_model(), t, 0, small_dataset(), tasks, enc);
    FAIL("expected an abort");
  } catch (const TrainingAborted& e) {
    for (const auto& b : e.last_good().model.blocks()) CHECK(b.params.values().allFinite());
    CHECK(e.last_good().step == e.step());
  }
}

TEST_CASE("instantiation is pure and needs only text") {
  const auto r = fit_small(3, 0);
  const HashEmbedder enc(64);
  const auto& task = small_dataset().tasks[0].task;
  const auto text = canonical_description(task);
  const auto a = instantiate(r.checkpoint.model, text, enc);
  const auto b = instantiate(r.checkpoint.model, text, enc);
  CHECK(a == b);
  const auto& m = r.checkpoint.model;
  CHECK(a.values() == m.generate_policy(m.project(enc.embed(text))).values());
  CHECK(a.manifest() == m.policy_manifest());
  const HashEmbedder other(128);
  CHECK_THROWS(instantiate(r.checkpoint, text, other));
}

TEST_CASE("evaluation is deterministic with the expected counts") {
  const auto tasks = label_tasks(small_dataset().task_specs(), "train");
  const EvalOptions opts{7, {0, 1, 2}};
  const ExpertSource expert;
  const auto a = evaluate(expert, tasks, opts, "h");
  const auto b = evaluate(expert, tasks, opts, "h");
  CHECK(a == b);
  CHECK(a.rows.size() == tasks.size() * 3);
  for (const auto& row : a.rows) CHECK(row.rollouts == 7);
  CHECK(a.per_task.size() == tasks.size());
  CHECK(a.per_split.size() == 1);
  CHECK(a.per_split[0].rollouts == static_cast<int>(tasks.size()) * 21);
  CHECK(a.success("train") >= 0.95);
  CHECK_THROWS_AS(a.success("test"), ConfigError);
  const auto j = a.to_json();
  CHECK(j.at("config_hash") == "h");
}

TEST_CASE("a random controller rarely succeeds") {
  auto p = ndiff::ParamVec::zeros(policy_manifest(ModelConfig{}));
  Rng rng(99);
  ndiff::glorot_init(p, rng);
  const ControllerSource src(p);
  const auto tasks = label_tasks(task_registry("pointgoal2d", 20, 1), "train");
  const auto r = evaluate(src, tasks, {10, {0}});
  CHECK(r.success("train") <= 0.2);
}

TEST_CASE("prompt learners refuse to act without a prompt") {
  auto c = tiny_model();
  c.kind = ModelKind::traj_hn;
  c.d_z = 64;
  const auto m = TenetModel::initialize(c, 0);
  const ModelSource src(m, nullptr);
  CHECK_THROWS_AS(src.make(small_dataset().tasks[0].task, 0), MissingPromptError);
  const ModelSource prompted(m, nullptr, Level::L0, expert_prompts());
  CHECK_NOTHROW(prompted.make(small_dataset().tasks[0].task, 0));
}

TEST_CASE("controller benchmark") {
  auto p = ndiff::ParamVec::zeros(policy_manifest(ModelConfig{}));
  Rng rng(1);
  ndiff::glorot_init(p, rng);
  CHECK_THROWS_AS(bench_controller(p, 9999), ConfigError);
  const auto r = bench_controller(p, 10000, Precision::f32);
  CHECK(r.param_count == 4610);
  CHECK(r.iterations == 10000);
  CHECK(r.median_ns > 0.0);
  CHECK(r.p99_ns >= r.median_ns);
  CHECK(r.hz == doctest::Approx(1e9 / r.median_ns));
  CHECK(r.to_json().at("machine").contains("cpu"));
  CHECK(precision_from_string("f32") == Precision::f32);
  CHECK_THROWS_AS(precision_from_string("f16"), ConfigError);
}

TEST_CASE("controller file round trip") {
  testing::TempDir dir("ctrl");
  auto p = ndiff::ParamVec::zeros(policy_manifest(ModelConfig{}));
  Rng rng(2);
  ndiff::glorot_init(p, rng);
  io::ControllerFile f{p, {{"description", "go"}, {"task_id", "x"}}};
  io::save_controller(f, dir / "c.tnct");
  const auto back = io::load_controller(dir / "c.tnct");
  CHECK(back.params == p);
  CHECK(back.info == f.info);
  const std::vector<double> s{0.1, 0.2, 0.0, -0.3};
  CHECK(ndiff::mlp_forward(back.params, s) == ndiff::mlp_forward(p, s));
  CHECK_THROWS_AS(io::load_controller(dir / "none.tnct"), MissingArtifactError);
}

TEST_CASE("scaling sizes are validated") {
  CHECK_NOTHROW(validate_scaling_sizes(std::vector<int>{25, 50, 100, 200}, 0.1));
  CHECK_THROWS_AS(validate_scaling_sizes(std::vector<int>{25, 25, 50}, 0.1), ConfigError);
  CHECK_THROWS_AS(validate_scaling_sizes(std::vector<int>{50, 25}, 0.1), ConfigError);
  CHECK_THROWS_AS(validate_scaling_sizes(std::vector<int>{2, 25}, 0.1), ConfigError);
  CHECK_THROWS_AS(validate_scaling_sizes(std::vector<int>{}, 0.1), ConfigError);
}

TEST_CASE("the expert tracks every in-range velocity command") {
  const ExpertSource expert;
  const auto targets = velocity_study_targets();
  const auto curve = velocity_alignment(expert, targets, 5, 0);
  REQUIRE(curve.size() == targets.size());
  for (const auto& p : curve) {
    if (p.out_of_range) {
      CHECK(p.instructed > EnvConstants::vel_max);
      continue;
    }
    INFO("target ", p.instructed);
    CHECK(std::abs(p.achieved_mean - p.instructed) <= 0.05);
  }
  CHECK(velocity_csv(curve).rfind("instructed", 0) == 0);
}

TEST_CASE("paraphrase order violations respect the band") {
  const std::vector<ParaphraseRow> rows{
      {"hash", Level::L0, 0.90, 10}, {"hash", Level::L1, 0.93, 10}, {"hash", Level::L2, 0.70, 10}};
  CHECK(paraphrase_order_violations(rows, 0.05).empty());
  CHECK(paraphrase_order_violations(rows, 0.01).size() == 1);
}
