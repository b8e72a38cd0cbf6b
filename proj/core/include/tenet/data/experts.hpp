#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/task.hpp"

namespace tenet {

inline constexpr std::string_view kExpertVersion = "scripted-experts-v1";

// Expert gains, committed alongside the environment constants.
struct ExpertGains {
  static constexpr double reach_kp = 4.0;
  static constexpr double reach_kd = 2.0;
  static constexpr double vel_kp = 8.0;
  static constexpr double osc_omega = 2.4;
  static constexpr double osc_pump = 2.0;
  static constexpr double osc_gain = 4.0;
};

// Scripted near-optimal action for a state of the task's family.
//   reach / hold_origin: a = clamp(kp (goal - pos) - kd v, +-1)
//   oscillate_x: saturated limit cycle on x,
//                a = clamp(K (-w^2 x + mu v (1 - (x^2 + v^2 / w^2) / A^2)), +-1),
//                which sits at +-1 for most of the cycle; PD to y = 0
//   track_velocity: a = clamp(kp (target - v) + target (1 - drag) / gain, +-1)
std::vector<double> expert_action(const TaskSpec& task, std::span<const double> state);

PolicyFn expert_policy(const TaskSpec& task);

struct ExpertGateReport {
  std::vector<std::string> task_ids;
  std::vector<double> success_rates;
  std::vector<std::string> failing;

  bool passed() const { return failing.empty(); }
};

ExpertGateReport expert_gate(std::span<const TaskSpec> tasks, int rollouts = 50, std::uint64_t seed = 0,
                             double threshold = 0.95);

}  // namespace tenet
