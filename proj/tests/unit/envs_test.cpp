#include <doctest.h>

#include <cmath>
#include <set>

#include "tenet/envs/descriptions.hpp"
#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/error.hpp"
#include "tenet/text/embedding.hpp"

using namespace tenet;

namespace {

Trajectory run_actions(const TaskSpec& task, std::uint64_t seed, const std::vector<double>& action) {
  return rollout(task, seed, [&](std::span<const double>, std::span<double> a) {
           std::copy(action.begin(), action.end(), a.begin());
         }).trajectory;
}

}  // namespace

TEST_CASE("reset distributions") {
  const auto vel = vel_track_task(1.2);
  for (std::uint64_t s = 0; s < 5; ++s) CHECK(env_reset(vel, s) == State{0.0});
  const auto pg = task_registry("pointgoal2d", 4, 1).front();
  CHECK(env_reset(pg, 0) == env_reset(pg, 0));
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto st = env_reset(pg, s);
    CHECK(std::abs(st[0]) <= 0.1);
    CHECK(std::abs(st[1]) <= 0.1);
    CHECK(st[2] == 0.0);
    CHECK(st[3] == 0.0);
  }
}

TEST_CASE("velocity tracking reward") {
  const auto task = vel_track_task(1.2);
  // v' = drag * 1.2 + gain * a = 1.2
  const double a = 1.2 * (1.0 - EnvConstants::vel_drag) / EnvConstants::vel_gain;
  const std::vector<double> s{1.2};
  const std::vector<double> act{a};
  const auto out = env_step(task, s, act, 0);
  CHECK(out.next_state[0] == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(out.reward == doctest::Approx(0.0).epsilon(1e-12));

  const auto far = vel_track_task(3.5);
  const std::vector<double> zero{0.0};
  const std::vector<double> rest{0.0};
  CHECK(env_step(far, rest, zero, 0).reward == -3.5);
}

TEST_CASE("full throttle converges to the velocity fixed point") {
  const auto task = vel_track_task(3.0);
  State s{0.0};
  const std::vector<double> one{1.0};
  for (int i = 0; i < 400; ++i) s = env_step(task, s, one, 0).next_state;
  CHECK(s[0] == doctest::Approx(3.0).epsilon(0.01 / 3.0));
  CHECK(EnvConstants::vel_max == doctest::Approx(3.0));
}

TEST_CASE("planar dynamics follow the velocity-then-position update") {
  const auto task = task_registry("switchworld10", 0, 1).front();
  const std::vector<double> s{0.2, -0.1, 0.95, 0.0};
  const std::vector<double> a{1.0, -0.5};
  const auto out = env_step(task, s, a, 0);
  CHECK(out.next_state[2] == doctest::Approx(1.0));  // clamped at max speed
  CHECK(out.next_state[3] == doctest::Approx(-0.05));
  CHECK(out.next_state[0] == doctest::Approx(0.2 + 0.1 * 1.0));
  CHECK(out.next_state[1] == doctest::Approx(-0.1 + 0.1 * -0.05));
  const std::vector<double> big{3.0, 0.0};
  CHECK(env_step(task, s, big, 0).clamped);
  CHECK_FALSE(out.clamped);
}

TEST_CASE("non-finite state is a numeric error") {
  const auto task = vel_track_task(1.0);
  const std::vector<double> s{std::nan("")};
  const std::vector<double> a{0.0};
  CHECK_THROWS_AS(env_step(task, s, a, 0), NumericError);
}

TEST_CASE("episodes run the full horizon and chain states") {
  for (const auto& task : {vel_track_task(0.6), task_registry("switchworld10", 0, 1)[9]}) {
    const auto traj = run_actions(task, 3, std::vector<double>(static_cast<std::size_t>(task.action_dim()), 0.3));
    CHECK(static_cast<int>(traj.transitions.size()) == task.horizon);
    for (std::size_t t = 1; t < traj.transitions.size(); ++t) {
      CHECK(traj.transitions[t].state == traj.transitions[t - 1].next_state);
    }
  }
}

TEST_CASE("dynamics are deterministic and rewards bounded") {
  const auto task = task_registry("pointgoal2d", 3, 2)[1];
  const auto a = run_actions(task, 5, {0.7, -0.9});
  const auto b = run_actions(task, 5, {0.7, -0.9});
  CHECK(a == b);
  for (const auto& tr : a.transitions) {
    CHECK(tr.reward <= 0.0);
    CHECK(tr.reward >= -2.0 * std::sqrt(2.0));
  }
  const auto vel = run_actions(vel_track_task(2.4), 1, {1.0});
  for (const auto& tr : vel.transitions) {
    CHECK(tr.reward <= 0.0);
    CHECK(tr.reward >= -4.0);
  }
}

TEST_CASE("success predicates") {
  const auto pg = task_registry("pointgoal2d", 5, 1)[0];
  Trajectory at_goal{pg.id, {}, 0};
  for (int t = 0; t < 60; ++t) {
    std::vector<double> s{pg.params[0], pg.params[1], 0.0, 0.0};
    at_goal.transitions.push_back({s, {0.0, 0.0}, 0.0, s});
  }
  CHECK(success(pg, at_goal));

  TaskSpec corner = pg;
  corner.params = {0.8, 0.8};
  CHECK_FALSE(success(corner, run_actions(corner, 0, {0.0, 0.0})));

  const auto vel = vel_track_task(0.6);
  CHECK_FALSE(success(vel, run_actions(vel, 0, {0.0})));
}

TEST_CASE("registries") {
  const auto vel = task_registry("veltrack", 0, 1);
  REQUIRE(vel.size() == 40);
  CHECK(vel.front().params[0] == doctest::Approx(0.075));
  CHECK(vel.back().params[0] == doctest::Approx(3.0));
  for (const auto& t : vel) CHECK(t.horizon == 100);

  const auto sw = task_registry("switchworld10", 0, 1);
  std::set<std::string> ids;
  for (const auto& t : sw) {
    ids.insert(t.id);
    CHECK(t.horizon == 60);
  }
  CHECK(ids.size() == 10);
  CHECK(task_registry("switchworld50", 0, 1).size() == 50);

  const auto pg = task_registry("pointgoal2d", 200, 3);
  CHECK(pg == task_registry("pointgoal2d", 200, 3));
  for (const auto& t : pg) {
    CHECK(std::abs(t.params[0]) <= 0.9);
    CHECK(std::abs(t.params[1]) <= 0.9);
  }
  CHECK_THROWS_AS(task_registry("cheetah", 1, 1), ConfigError);
  CHECK_THROWS_AS(task_registry("pointgoal2d", 0, 1), ConfigError);

  const auto held = vel_track_heldout_targets();
  CHECK(std::vector<double>(held.begin(), held.end()) == std::vector<double>{0.225, 0.6, 1.2, 1.8, 2.025});
  const auto j = registry_to_json(sw);
  CHECK(j.size() == 10);
  CHECK(j[0].contains("description"));
}

TEST_CASE("task validation") {
  auto t = vel_track_task(1.0);
  t.params = {4.5};
  CHECK_THROWS_AS(validate(t), ConfigError);
  auto p = task_registry("pointgoal2d", 1, 1)[0];
  p.params = {1.5, 0.0};
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = task_registry("pointgoal2d", 1, 1)[0];
  CHECK(task_from_json(to_json(p)) == p);
}

TEST_CASE("canonical velocity command") {
  CHECK(sample_description(vel_track_task(1.2), Level::L0, 0) == "Move forward with target velocity 1.200 m/s.");
  CHECK(sample_description(vel_track_task(1.2), Level::L0, 99) == "Move forward with target velocity 1.200 m/s.");
}

TEST_CASE("descriptions are deterministic and keep their numbers") {
  const auto task = vel_track_task(1.2);
  const auto l0 = canonical_description(task);
  std::set<std::string> l2;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto d = sample_description(task, Level::L2, s);
    CHECK(d == sample_description(task, Level::L2, s));
    CHECK(d != l0);
    CHECK(extract_numeric_literals(d) == std::vector<double>{1.2});
    l2.insert(d);
  }
  CHECK(l2.size() > 10);
}

TEST_CASE("every level of every registry recovers the task parameters") {
  for (const char* suite : {"veltrack", "switchworld10", "switchworld50"}) {
    for (const auto& task : task_registry(suite, 0, 1)) {
      for (auto level : {Level::L0, Level::L1, Level::L2}) {
        for (std::uint64_t s = 0; s < 5; ++s) {
          const auto nums = extract_numeric_literals(sample_description(task, level, s));
          REQUIRE(nums.size() == task.params.size());
          for (std::size_t k = 0; k < nums.size(); ++k) {
            CHECK(nums[k] == doctest::Approx(task.params[k]).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("levels parse") {
  CHECK(level_from_string("L2") == Level::L2);
  CHECK_THROWS_AS(level_from_string("L3"), ConfigError);
}
