#include "tenet/data/experts.hpp"

#include <algorithm>
#include <cmath>

#include "tenet/error.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

std::vector<double> expert_action(const TaskSpec& task, std::span<const double> s) {
  if (static_cast<int>(s.size()) != task.state_dim()) {
    throw ShapeError("expert_action: state dimension does not match task family");
  }
  using G = ExpertGains;
  switch (task.behavior) {
    case Behavior::track_velocity: {
      const double target = task.params[0];
      const double feedforward = target * (1.0 - EnvConstants::vel_drag) / EnvConstants::vel_gain;
      return {clamp1(G::vel_kp * (target - s[0]) + feedforward)};
    }
    case Behavior::reach:
    case Behavior::hold_origin: {
      const double gx = task.params[0];
      const double gy = task.params[1];
      return {clamp1(G::reach_kp * (gx - s[0]) - G::reach_kd * s[2]),
              clamp1(G::reach_kp * (gy - s[1]) - G::reach_kd * s[3])};
    }
    case Behavior::oscillate_x: {
      const double x = s[0];
      const double vx = s[2];
      const double amp = task.params[0];
      const double w = G::osc_omega;
      const double energy = x * x + (vx / w) * (vx / w);
      const double ax = clamp1(G::osc_gain * (-w * w * x + G::osc_pump * vx * (1.0 - energy / (amp * amp))));
      return {ax, clamp1(-G::reach_kp * s[1] - G::reach_kd * s[3])};
    }
  }
  return {};
}

PolicyFn expert_policy(const TaskSpec& task) {
  return [task](std::span<const double> state, std::span<double> action) {
    const auto a = expert_action(task, state);
    std::copy(a.begin(), a.end(), action.begin());
  };
}

ExpertGateReport expert_gate(std::span<const TaskSpec> tasks, int rollouts, std::uint64_t seed,
                             double threshold) {
  ExpertGateReport report;
  for (const auto& task : tasks) {
    const auto policy = expert_policy(task);
    int ok = 0;
    for (int i = 0; i < rollouts; ++i) {
      const auto r = rollout(task, Rng::derive(seed, {0x9a7eULL, static_cast<std::uint64_t>(i)}), policy);
      ok += (!r.failed && success(task, r.trajectory)) ? 1 : 0;
    }
    const double rate = static_cast<double>(ok) / static_cast<double>(rollouts);
    report.task_ids.push_back(task.id);
    report.success_rates.push_back(rate);
    if (rate < threshold) report.failing.push_back(task.id);
  }
  return report;
}

}  // namespace tenet
