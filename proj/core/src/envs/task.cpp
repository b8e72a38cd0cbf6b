#include "tenet/envs/task.hpp"

#include <cmath>

#include "tenet/error.hpp"

namespace tenet {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::point_goal_2d: return "PointGoal2D";
    case Family::vel_track_1d: return "VelTrack1D";
    case Family::switch_world: return "SwitchWorld";
  }
  return "?";
}

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::reach: return "reach";
    case Behavior::hold_origin: return "hold_origin";
    case Behavior::oscillate_x: return "oscillate_x";
    case Behavior::track_velocity: return "track_velocity";
  }
  return "?";
}

Family family_from_string(std::string_view s) {
  if (s == "PointGoal2D") return Family::point_goal_2d;
  if (s == "VelTrack1D") return Family::vel_track_1d;
  if (s == "SwitchWorld") return Family::switch_world;
  throw ConfigError("unknown family '" + std::string(s) + "'");
}

Behavior behavior_from_string(std::string_view s) {
  if (s == "reach") return Behavior::reach;
  if (s == "hold_origin") return Behavior::hold_origin;
  if (s == "oscillate_x") return Behavior::oscillate_x;
  if (s == "track_velocity") return Behavior::track_velocity;
  throw ConfigError("unknown behavior '" + std::string(s) + "'");
}

nlohmann::json EnvConstants::to_json() {
  return {
      {"dt", dt},
      {"max_speed", max_speed},
      {"arena", arena},
      {"reset_spread", reset_spread},
      {"vel_drag", vel_drag},
      {"vel_gain", vel_gain},
      {"reach_radius", reach_radius},
      {"reach_window", reach_window},
      {"hold_radius", hold_radius},
      {"hold_window", hold_window},
      {"osc_switch", osc_switch},
      {"osc_min_amplitude", osc_min_amplitude},
      {"osc_min_crossings", osc_min_crossings},
      {"vel_band", vel_band},
      {"vel_window", vel_window},
      {"horizon_2d", horizon_2d},
      {"horizon_vel", horizon_vel},
  };
}

void validate(const TaskSpec& t) {
  auto fail = [&](const std::string& why) { throw ConfigError("task '" + t.id + "': " + why); };
  for (double p : t.params) {
    if (!std::isfinite(p)) fail("non-finite parameter");
  }
  switch (t.family) {
    case Family::vel_track_1d:
      if (t.behavior != Behavior::track_velocity) fail("VelTrack1D tasks track a velocity");
      if (t.params.size() != 1 || !(t.params[0] > 0.0) || t.params[0] > 4.0) {
        fail("target velocity must lie in (0, 4]");
      }
      if (t.horizon != EnvConstants::horizon_vel) fail("horizon must be 100");
      return;
    case Family::point_goal_2d:
      if (t.behavior != Behavior::reach) fail("PointGoal2D tasks are reach tasks");
      break;
    case Family::switch_world:
      if (t.behavior == Behavior::track_velocity) fail("track_velocity is not a SwitchWorld behavior");
      break;
  }
  if (t.horizon != EnvConstants::horizon_2d) fail("horizon must be 60");
  switch (t.behavior) {
    case Behavior::reach:
    case Behavior::hold_origin:
      if (t.params.size() != 2) fail("expected goal coordinates");
      if (std::abs(t.params[0]) > 1.0 || std::abs(t.params[1]) > 1.0) fail("goal outside [-1, 1]^2");
      if (t.behavior == Behavior::hold_origin && (t.params[0] != 0.0 || t.params[1] != 0.0)) {
        fail("hold_origin centre must be the origin");
      }
      break;
    case Behavior::oscillate_x:
      if (t.params.size() != 1 || !(t.params[0] > 0.0) || t.params[0] >= 1.0) {
        fail("oscillation amplitude must lie in (0, 1)");
      }
      break;
    case Behavior::track_velocity:
      break;
  }
}

nlohmann::json to_json(const TaskSpec& t) {
  return {{"id", t.id},
          {"family", to_string(t.family)},
          {"behavior", to_string(t.behavior)},
          {"params", t.params},
          {"horizon", t.horizon},
          {"descriptor_seed", t.descriptor_seed}};
}

TaskSpec task_from_json(const nlohmann::json& j) {
  TaskSpec t;
  try {
    t.id = j.at("id").get<std::string>();
    t.family = family_from_string(j.at("family").get<std::string>());
    t.behavior = behavior_from_string(j.at("behavior").get<std::string>());
    t.params = j.at("params").get<std::vector<double>>();
    t.horizon = j.at("horizon").get<int>();
    t.descriptor_seed = j.at("descriptor_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed task record: ") + e.what());
  }
  validate(t);
  return t;
}

double Trajectory::episodic_return() const {
  double r = 0.0;
  for (const auto& tr : transitions) r += tr.reward;
  return r;
}

}  // namespace tenet
