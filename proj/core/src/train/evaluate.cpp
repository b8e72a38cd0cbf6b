#include "tenet/train/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "tenet/envs/dynamics.hpp"
#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

struct Pool {
  int rollouts = 0;
  int successes = 0;
  int failed = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  int tasks = 0;

  void add(const EvalRow& r, const std::vector<double>& returns) {
    rollouts += r.rollouts;
    successes += r.successes;
    failed += r.failed;
    for (double x : returns) {
      sum += x;
      sum_sq += x * x;
    }
  }

  EvalAggregate finish(std::string name, std::string split) const {
    EvalAggregate a{std::move(name), std::move(split), tasks, rollouts, failed, 0.0, 0.0, 0.0};
    if (rollouts > 0) {
      const double n = rollouts;
      a.success_rate = successes / n;
      a.mean_return = sum / n;
      a.std_return = std::sqrt(std::max(0.0, sum_sq / n - a.mean_return * a.mean_return));
    }
    return a;
  }
};

}  // namespace

std::vector<EvalTask> label_tasks(std::span<const TaskSpec> tasks, const std::string& split) {
  std::vector<EvalTask> out;
  for (const auto& t : tasks) out.push_back({t, split});
  return out;
}

int EvalReport::failed_rollouts() const {
  int n = 0;
  for (const auto& r : rows) n += r.failed;
  return n;
}

double EvalReport::success(const std::string& split) const {
  for (const auto& s : per_split) {
    if (s.split == split) return s.success_rate;
  }
  throw ConfigError("report has no '" + split + "' split");
}

nlohmann::json EvalReport::to_json() const {
  auto agg = [](const EvalAggregate& a) {
    return nlohmann::json{{"name", a.name},           {"split", a.split},
                          {"tasks", a.tasks},         {"rollouts", a.rollouts},
                          {"failed", a.failed},       {"success_rate", a.success_rate},
                          {"mean_return", a.mean_return}, {"std_return", a.std_return}};
  };
  nlohmann::json j = {{"format", "tenet-eval-report"},
                      {"version", kEvalReportVersion},
                      {"policy", policy},
                      {"config_hash", config_hash},
                      {"n_rollouts", n_rollouts},
                      {"seeds", seeds},
                      {"failed_rollouts", failed_rollouts()}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"task_id", r.task_id},
                         {"split", r.split},
                         {"seed", r.seed},
                         {"rollouts", r.rollouts},
                         {"successes", r.successes},
                         {"failed", r.failed},
                         {"success_rate", r.success_rate},
                         {"mean_return", r.mean_return},
                         {"std_return", r.std_return}});
  }
  j["tasks"] = nlohmann::json::array();
  for (const auto& a : per_task) j["tasks"].push_back(agg(a));
  j["splits"] = nlohmann::json::array();
  for (const auto& a : per_split) j["splits"].push_back(agg(a));
  return j;
}

std::string EvalReport::to_csv() const {
  std::string out = "task_id,split,seed,rollouts,successes,failed,success_rate,mean_return,std_return\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%llu,%d,%d,%d,%.6f,%.6f,%.6f\n", r.task_id.c_str(), r.split.c_str(),
                  static_cast<unsigned long long>(r.seed), r.rollouts, r.successes, r.failed, r.success_rate,
                  r.mean_return, r.std_return);
    out += buf;
  }
  return out;
}

EvalReport evaluate(const PolicySource& source, std::span<const EvalTask> tasks, const EvalOptions& options,
                    std::string config_hash) {
  if (options.n_rollouts < 1) throw ConfigError("n_rollouts must be positive");
  if (options.seeds.empty()) throw ConfigError("evaluation needs at least one seed");
  if (tasks.empty()) throw ConfigError("evaluation needs at least one task");
  EvalReport report;
  report.policy = source.describe();
  report.config_hash = std::move(config_hash);
  report.n_rollouts = options.n_rollouts;
  report.seeds = options.seeds;

  std::vector<std::string> split_order;
  std::map<std::string, Pool> splits;
  for (const auto& et : tasks) {
    validate(et.task);
    Pool task_pool;
    task_pool.tasks = 1;
    const std::uint64_t tid = io::fnv1a64(et.task.id);
    for (std::uint64_t seed : options.seeds) {
      const PolicyFn policy = source.make(et.task, seed);
      EvalRow row{et.task.id, et.split, seed, options.n_rollouts, 0, 0, 0.0, 0.0, 0.0};
      std::vector<double> returns;
      for (int r = 0; r < options.n_rollouts; ++r) {
        const auto out = rollout(et.task, Rng::derive(seed, {tid, static_cast<std::uint64_t>(r)}), policy);
        returns.push_back(out.trajectory.episodic_return());
        if (out.failed) {
          ++row.failed;
        } else if (success(et.task, out.trajectory)) {
          ++row.successes;
        }
      }
      Pool p;
      p.add(row, returns);
      const auto a = p.finish({}, {});
      row.success_rate = a.success_rate;
      row.mean_return = a.mean_return;
      row.std_return = a.std_return;
      task_pool.add(row, returns);
      if (!splits.count(et.split)) split_order.push_back(et.split);
      splits[et.split].add(row, returns);
      report.rows.push_back(std::move(row));
    }
    ++splits[et.split].tasks;
    report.per_task.push_back(task_pool.finish(et.task.id, et.split));
  }
  for (const auto& s : split_order) report.per_split.push_back(splits[s].finish(s, s));
  return report;
}

}  // namespace tenet
