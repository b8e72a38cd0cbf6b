#include "tenet/envs/registry.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "tenet/envs/descriptions.hpp"
#include "tenet/error.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

constexpr std::array<double, 5> kHeldOut{0.225, 0.6, 1.2, 1.8, 2.025};

double round3(double v) {
  const double r = std::round(v * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

TaskSpec planar(std::string id, Family fam, Behavior b, std::vector<double> params, std::uint64_t dseed) {
  TaskSpec t;
  t.id = std::move(id);
  t.family = fam;
  t.behavior = b;
  t.params = std::move(params);
  t.horizon = EnvConstants::horizon_2d;
  t.descriptor_seed = dseed;
  validate(t);
  return t;
}

void append_switch_extras(std::vector<TaskSpec>& out, std::string_view prefix, std::uint64_t seed) {
  const auto n = static_cast<std::uint64_t>(out.size());
  out.push_back(planar(std::string(prefix) + "/hold_origin", Family::switch_world, Behavior::hold_origin,
                       {0.0, 0.0}, Rng::derive(seed, {n})));
  out.push_back(planar(std::string(prefix) + "/oscillate_x", Family::switch_world, Behavior::oscillate_x,
                       {EnvConstants::osc_switch}, Rng::derive(seed, {n + 1})));
}

}  // namespace

std::span<const double> vel_track_heldout_targets() { return kHeldOut; }

TaskSpec vel_track_task(double target, std::uint64_t descriptor_seed) {
  TaskSpec t;
  t.id = "vel/" + format_param(target);
  t.family = Family::vel_track_1d;
  t.behavior = Behavior::track_velocity;
  t.params = {target};
  t.horizon = EnvConstants::horizon_vel;
  t.descriptor_seed = descriptor_seed;
  validate(t);
  return t;
}

Family suite_family(std::string_view suite) {
  if (suite == "veltrack") return Family::vel_track_1d;
  if (suite == "switchworld10" || suite == "switchworld50") return Family::switch_world;
  if (suite == "pointgoal2d") return Family::point_goal_2d;
  throw ConfigError("unknown task suite '" + std::string(suite) + "'");
}

std::vector<TaskSpec> task_registry(std::string_view suite, int count, std::uint64_t seed) {
  suite_family(suite);
  std::vector<TaskSpec> out;
  if (suite == "veltrack") {
    if (count != 0 && count != 40) throw ConfigError("veltrack registry has exactly 40 targets");
    for (int k = 1; k <= 40; ++k) {
      out.push_back(vel_track_task(static_cast<double>(75 * k) / 1000.0, Rng::derive(seed, {static_cast<std::uint64_t>(k)})));
    }
    return out;
  }
  if (suite == "switchworld10") {
    if (count != 0 && count != 10) throw ConfigError("switchworld10 registry has exactly 10 tasks");
    constexpr std::array<const char*, 8> names{"e", "ne", "n", "nw", "w", "sw", "s", "se"};
    for (std::size_t k = 0; k < names.size(); ++k) {
      const double ang = static_cast<double>(k) * std::numbers::pi / 4.0;
      out.push_back(planar(std::string("sw10/reach_") + names[k], Family::switch_world, Behavior::reach,
                           {round3(0.8 * std::cos(ang)), round3(0.8 * std::sin(ang))},
                           Rng::derive(seed, {k})));
    }
    append_switch_extras(out, "sw10", seed);
    return out;
  }
  if (suite == "switchworld50") {
    if (count != 0 && count != 50) throw ConfigError("switchworld50 registry has exactly 50 tasks");
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < 7; ++j) {
        if (i == 3 && j == 3) continue;
        const double x = round3(-0.9 + 0.3 * i);
        const double y = round3(-0.9 + 0.3 * j);
        char id[64];
        std::snprintf(id, sizeof(id), "sw50/reach_%d_%d", i, j);
        out.push_back(planar(id, Family::switch_world, Behavior::reach, {x, y},
                             Rng::derive(seed, {out.size()})));
      }
    }
    append_switch_extras(out, "sw50", seed);
    return out;
  }
  // pointgoal2d: Halton (2, 3) with a seeded Cranley-Patterson rotation.
  if (count < 1) throw ConfigError("pointgoal2d registry needs count >= 1");
  Rng rng(Rng::derive(seed, {0x90a1ULL}));
  const double shift_x = rng.uniform();
  const double shift_y = rng.uniform();
  std::set<std::pair<double, double>> seen;
  for (std::uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
    const double u = std::fmod(radical_inverse(i, 2) + shift_x, 1.0);
    const double v = std::fmod(radical_inverse(i, 3) + shift_y, 1.0);
    const double x = round3(-0.9 + 1.8 * u);
    const double y = round3(-0.9 + 1.8 * v);
    if (!seen.insert({x, y}).second) continue;
    char id[64];
    std::snprintf(id, sizeof(id), "pg%d/goal_%03d", count, static_cast<int>(out.size()));
    out.push_back(planar(id, Family::point_goal_2d, Behavior::reach, {x, y}, Rng::derive(seed, {i})));
  }
  return out;
}

nlohmann::json registry_to_json(std::span<const TaskSpec> tasks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tasks) {
    nlohmann::json j = to_json(t);
    j["description"] = canonical_description(t);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace tenet
