#include "tenet/ndiff/adam.hpp"

#include <algorithm>
#include <cmath>

#include "tenet/error.hpp"

namespace tenet::ndiff {

void adam_step(AdamState& state, ParamVec& params, Eigen::Ref<const Vec> grad, double lr,
               const AdamConfig& config) {
  const auto n = static_cast<Eigen::Index>(params.size());
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw ShapeError("adam_step: parameter, gradient and state sizes differ");
  }
  if (!(lr > 0.0)) throw ConfigError("adam_step: learning rate must be positive");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  // Chunked so that m, v and the parameters are each streamed through memory
  // once; the state vectors can be far larger than cache.
  constexpr Eigen::Index kChunk = 2048;
  for (Eigen::Index at = 0; at < n; at += kChunk) {
    const Eigen::Index len = std::min(kChunk, n - at);
    auto g = grad.segment(at, len).array();
    auto m = state.m.segment(at, len).array();
    auto v = state.v.segment(at, len).array();
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.square();
    params.values().segment(at, len).array() -= lr * (m / c1) / ((v / c2).sqrt() + config.epsilon);
  }
}

}  // namespace tenet::ndiff
