#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tenet/envs/task.hpp"

namespace tenet {

// Suites understood by task_registry:
//   veltrack       40 targets on the grid 0.075, 0.150, ..., 3.000 (count must be 0 or 40)
//   switchworld10  8 compass waypoints at radius 0.8, hold_origin, oscillate_x
//   switchworld50  48 grid waypoints in [-0.9, 0.9]^2, hold_origin, oscillate_x
//   pointgoal2d    `count` low-discrepancy goals in [-0.9, 0.9]^2
// Throws ConfigError for unknown suites or count < 1.
std::vector<TaskSpec> task_registry(std::string_view suite, int count, std::uint64_t seed);

// Families of a suite name ("veltrack" -> VelTrack1D, ...).
Family suite_family(std::string_view suite);

TaskSpec vel_track_task(double target, std::uint64_t descriptor_seed = 0);

// Held-out targets of the velocity-tracking study and its out-of-range command.
std::span<const double> vel_track_heldout_targets();
inline constexpr double kVelTrackOodTarget = 3.5;

// {task id, family, params, horizon, canonical L0 description} per task.
nlohmann::json registry_to_json(std::span<const TaskSpec> tasks);

}  // namespace tenet
