#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tenet/envs/task.hpp"

namespace tenet {

using State = std::vector<double>;

struct StepOutcome {
  State next_state;
  double reward = 0.0;
  bool done = false;
  // True when the action had to be clamped into [-1, 1].
  bool clamped = false;
};

// PointGoal2D / SwitchWorld: (x, y, vx, vy) with position uniform in
// [-0.1, 0.1]^2 and zero velocity. VelTrack1D: (v) = (0).
State env_reset(const TaskSpec& task, std::uint64_t seed);

// Deterministic transition. `step_index` is the 0-based index of this step
// within the episode; done is set on the last step of the horizon.
StepOutcome env_step(const TaskSpec& task, std::span<const double> state, std::span<const double> action,
                     int step_index);

bool success(const TaskSpec& task, const Trajectory& traj);

// Mean speed over the final vel_window next-states of a VelTrack1D episode.
double achieved_velocity(const Trajectory& traj);

// Process-wide count of env_step calls, used to check that training is offline.
std::uint64_t env_step_count();
void reset_env_step_count();

using PolicyFn = std::function<void(std::span<const double> state, std::span<double> action)>;

struct Rollout {
  Trajectory trajectory;
  // A non-finite action ended the episode early.
  bool failed = false;
};

Rollout rollout(const TaskSpec& task, std::uint64_t reset_seed, const PolicyFn& policy);

}  // namespace tenet
