#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tenet {

enum class Family { point_goal_2d, vel_track_1d, switch_world };

// Closed behavior registry. Each entry has a dynamics/reward/success triple in
// dynamics.cpp and an expert in experts.cpp.
enum class Behavior { reach, hold_origin, oscillate_x, track_velocity };

std::string_view to_string(Family f);
std::string_view to_string(Behavior b);
Family family_from_string(std::string_view s);
Behavior behavior_from_string(std::string_view s);

// Physical and success constants shared by every family. They are written
// into dataset provenance so downstream artifacts can be checked against them.
struct EnvConstants {
  static constexpr double dt = 0.1;
  static constexpr double max_speed = 1.0;
  static constexpr double arena = 1.0;
  static constexpr double reset_spread = 0.1;

  static constexpr double vel_drag = 0.95;
  static constexpr double vel_gain = 0.15;
  static constexpr double vel_max = vel_gain / (1.0 - vel_drag);

  static constexpr double reach_radius = 0.1;
  static constexpr int reach_window = 10;
  static constexpr double hold_radius = 0.15;
  static constexpr int hold_window = 20;
  static constexpr double osc_switch = 0.45;
  static constexpr double osc_min_amplitude = 0.4;
  static constexpr int osc_min_crossings = 3;
  static constexpr double vel_band = 0.15;
  static constexpr int vel_window = 20;

  static constexpr int horizon_2d = 60;
  static constexpr int horizon_vel = 100;

  static nlohmann::json to_json();
};

struct TaskSpec {
  std::string id;
  Family family = Family::point_goal_2d;
  Behavior behavior = Behavior::reach;
  // reach: goal (x, y); hold_origin: centre (0, 0); oscillate_x: switch
  // amplitude; track_velocity: target speed.
  std::vector<double> params;
  int horizon = EnvConstants::horizon_2d;
  std::uint64_t descriptor_seed = 0;

  int state_dim() const { return family == Family::vel_track_1d ? 1 : 4; }
  int action_dim() const { return family == Family::vel_track_1d ? 1 : 2; }

  bool operator==(const TaskSpec&) const = default;
};

// Throws ConfigError when the task violates its family's invariants.
void validate(const TaskSpec& task);

nlohmann::json to_json(const TaskSpec& task);
TaskSpec task_from_json(const nlohmann::json& j);

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;

  bool operator==(const Transition&) const = default;
};

struct Trajectory {
  std::string task_id;
  std::vector<Transition> transitions;
  std::uint64_t seed = 0;

  double episodic_return() const;
  bool operator==(const Trajectory&) const = default;
};

}  // namespace tenet
