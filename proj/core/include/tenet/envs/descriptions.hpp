#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tenet/envs/task.hpp"

namespace tenet {

// Paraphrase levels: canonical template, synonym-substituted and reordered,
// and L1 wrapped with two distractor clauses.
enum class Level { L0, L1, L2 };

std::string_view to_string(Level l);
Level level_from_string(std::string_view s);

// Formats a task parameter the way every description prints it (3 decimals).
std::string format_param(double v);

// Draw from the task's descriptor distribution. Deterministic in
// (task, level, seed); every level keeps the task's numeric literals in order.
std::string sample_description(const TaskSpec& task, Level level, std::uint64_t seed);

inline std::string canonical_description(const TaskSpec& task) {
  return sample_description(task, Level::L0, 0);
}

}  // namespace tenet
