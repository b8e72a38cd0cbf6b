#pragma once

#include <cstdint>

#include "tenet/ndiff/param_vec.hpp"

namespace tenet::ndiff {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Vec m;
  Vec v;
  std::int64_t step = 0;

  static AdamState zeros(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return {Vec::Zero(k), Vec::Zero(k), 0};
  }
};

// One bias-corrected Adam update of params in place; increments state.step.
void adam_step(AdamState& state, ParamVec& params, Eigen::Ref<const Vec> grad, double lr,
               const AdamConfig& config = {});

}  // namespace tenet::ndiff
