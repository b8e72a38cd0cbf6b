#include "tenet/envs/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "tenet/error.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

std::atomic<std::uint64_t> g_step_count{0};

using C = EnvConstants;

double clamp1(double x, bool& clamped) {
  if (x > 1.0) {
    clamped = true;
    return 1.0;
  }
  if (x < -1.0) {
    clamped = true;
    return -1.0;
  }
  return x;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite ") + what);
  }
}

double reward_2d(const TaskSpec& task, const State& s) {
  const double x = s[0];
  const double y = s[1];
  switch (task.behavior) {
    case Behavior::reach:
      return -std::hypot(x - task.params[0], y - task.params[1]);
    case Behavior::hold_origin:
      return -std::hypot(x, y);
    case Behavior::oscillate_x:
      return -std::abs(std::abs(x) - task.params[0]) - std::abs(y);
    case Behavior::track_velocity:
      break;
  }
  throw ConfigError("behavior has no planar reward");
}

}  // namespace

std::uint64_t env_step_count() { return g_step_count.load(); }
void reset_env_step_count() { g_step_count.store(0); }

State env_reset(const TaskSpec& task, std::uint64_t seed) {
  if (task.family == Family::vel_track_1d) return {0.0};
  Rng rng(Rng::derive(seed, {0x5e5e7ULL}));
  const double x = rng.uniform(-C::reset_spread, C::reset_spread);
  const double y = rng.uniform(-C::reset_spread, C::reset_spread);
  return {x, y, 0.0, 0.0};
}

StepOutcome env_step(const TaskSpec& task, std::span<const double> state, std::span<const double> action,
                     int step_index) {
  g_step_count.fetch_add(1, std::memory_order_relaxed);
  if (static_cast<int>(state.size()) != task.state_dim() ||
      static_cast<int>(action.size()) != task.action_dim()) {
    throw ShapeError("env_step: state/action dimension does not match task family");
  }
  require_finite(state, "state");
  require_finite(action, "action");
  StepOutcome out;
  out.done = step_index + 1 >= task.horizon;
  if (task.family == Family::vel_track_1d) {
    const double a = clamp1(action[0], out.clamped);
    const double v = std::max(0.0, C::vel_drag * state[0] + C::vel_gain * a);
    out.next_state = {v};
    out.reward = -std::abs(v - task.params[0]);
    return out;
  }
  double vx = std::clamp(state[2] + C::dt * clamp1(action[0], out.clamped), -C::max_speed, C::max_speed);
  double vy = std::clamp(state[3] + C::dt * clamp1(action[1], out.clamped), -C::max_speed, C::max_speed);
  double x = state[0] + C::dt * vx;
  double y = state[1] + C::dt * vy;
  // Arena walls absorb the normal velocity component.
  if (std::abs(x) > C::arena) {
    x = std::copysign(C::arena, x);
    vx = 0.0;
  }
  if (std::abs(y) > C::arena) {
    y = std::copysign(C::arena, y);
    vy = 0.0;
  }
  out.next_state = {x, y, vx, vy};
  out.reward = reward_2d(task, out.next_state);
  return out;
}

double achieved_velocity(const Trajectory& traj) {
  const auto& tr = traj.transitions;
  if (tr.empty()) throw InputError("achieved_velocity of an empty trajectory");
  const std::size_t n = std::min<std::size_t>(tr.size(), C::vel_window);
  double sum = 0.0;
  for (std::size_t i = tr.size() - n; i < tr.size(); ++i) sum += tr[i].next_state[0];
  return sum / static_cast<double>(n);
}

bool success(const TaskSpec& task, const Trajectory& traj) {
  const auto& tr = traj.transitions;
  if (tr.empty()) return false;
  const std::size_t n = tr.size();
  switch (task.behavior) {
    case Behavior::track_velocity:
      return std::abs(achieved_velocity(traj) - task.params[0]) < C::vel_band;
    case Behavior::reach: {
      const std::size_t w = std::min<std::size_t>(n, C::reach_window);
      for (std::size_t i = n - w; i < n; ++i) {
        const auto& s = tr[i].next_state;
        if (std::hypot(s[0] - task.params[0], s[1] - task.params[1]) < C::reach_radius) return true;
      }
      return false;
    }
    case Behavior::hold_origin: {
      if (n < static_cast<std::size_t>(C::hold_window)) return false;
      for (std::size_t i = n - C::hold_window; i < n; ++i) {
        const auto& s = tr[i].next_state;
        if (!(std::hypot(s[0], s[1]) < C::hold_radius)) return false;
      }
      return true;
    }
    case Behavior::oscillate_x: {
      int crossings = 0;
      double peak = std::abs(tr.front().state[0]);
      int last_sign = tr.front().state[0] > 0.0 ? 1 : (tr.front().state[0] < 0.0 ? -1 : 0);
      for (const auto& t : tr) {
        const double x = t.next_state[0];
        peak = std::max(peak, std::abs(x));
        const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
        if (s != 0) {
          if (last_sign != 0 && s != last_sign) ++crossings;
          last_sign = s;
        }
      }
      return crossings >= C::osc_min_crossings && peak >= C::osc_min_amplitude;
    }
  }
  return false;
}

Rollout rollout(const TaskSpec& task, std::uint64_t reset_seed, const PolicyFn& policy) {
  Rollout out;
  out.trajectory.task_id = task.id;
  out.trajectory.seed = reset_seed;
  out.trajectory.transitions.reserve(static_cast<std::size_t>(task.horizon));
  State s = env_reset(task, reset_seed);
  std::vector<double> a(static_cast<std::size_t>(task.action_dim()));
  for (int t = 0; t < task.horizon; ++t) {
    std::fill(a.begin(), a.end(), 0.0);
    policy(s, a);
    if (!std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); })) {
      out.failed = true;
      break;
    }
    StepOutcome step = env_step(task, s, a, t);
    for (auto& v : a) v = std::clamp(v, -1.0, 1.0);
    out.trajectory.transitions.push_back({s, a, step.reward, step.next_state});
    s = std::move(step.next_state);
    if (step.done) break;
  }
  return out;
}

}  // namespace tenet
