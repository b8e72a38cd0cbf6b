// Values frozen from tests/oracles/reference.py, which recomputes them with
// plain Python arithmetic.
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tenet/envs/dynamics.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/model/losses.hpp"
#include "tenet/ndiff/adam.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/rng.hpp"

using namespace tenet;
using namespace tenet::ndiff;

TEST_CASE("oracle: small tanh network forward") {
  const std::vector<int> hidden{2};
  auto p = ParamVec::zeros(mlp_manifest("net", 2, hidden, 1, Activation::tanh, Activation::linear));
  Rng rng(7);
  glorot_init(p, rng);
  // Weights as drawn at seed 7; frozen here so that a change of the
  // initializer is caught alongside the forward pass.
  CHECK(p.values()[0] == doctest::Approx(0.62311419323720463).epsilon(1e-15));
  CHECK(p.values()[3] == doctest::Approx(0.95998730641878161).epsilon(1e-15));
  CHECK(p.values()[7] == doctest::Approx(-1.2583865784726014).epsilon(1e-15));
  p.values()[4] = 0.1;
  p.values()[5] = -0.2;
  p.values()[8] = 0.05;
  const std::vector<double> x{1.0, -1.0};
  CHECK(mlp_forward(p, x)[0] == doctest::Approx(1.636755239147744).epsilon(1e-14));
}

TEST_CASE("oracle: three Adam steps on a constant gradient") {
  ParamVec p({{"w", 1, 1, Activation::linear}}, Vec::Constant(2, 0.5));
  auto s = AdamState::zeros(2);
  const Vec g = Vec::Ones(2);
  const double expected[] = {0.40000000099999999, 0.30000000200000065, 0.20000000300000068};
  for (double e : expected) {
    adam_step(s, p, g, 0.1);
    CHECK(p.values()[0] == doctest::Approx(e).epsilon(1e-15));
  }
}

TEST_CASE("oracle: two-pair InfoNCE closed form") {
  Mat a(2, 2);
  a << 1.0, 0.0, -1.0, 0.0;
  const GroundingBatch b({"p", "q"}, a, a);
  CHECK(infonce_text_traj(b, 0.1) == doctest::Approx(2.0611536900435727e-09).epsilon(1e-9));
}

TEST_CASE("oracle: four-task InfoNCE against a plain loop") {
  Rng rng(17);
  Mat a(4, 6), b(4, 6);
  for (auto& v : a.reshaped()) v = rng.normal();
  for (auto& v : b.reshaped()) v = rng.normal();
  double total = 0.0;
  for (int dir = 0; dir < 2; ++dir) {
    for (int i = 0; i < 4; ++i) {
      double z = 0.0;
      double pos = 0.0;
      for (int j = 0; j < 4; ++j) {
        const Vec u = (dir == 0 ? a.row(i) : b.row(i)).transpose();
        const Vec w = (dir == 0 ? b.row(j) : a.row(j)).transpose();
        const double logit = u.dot(w) / (u.norm() * w.norm()) / 0.1;
        z += std::exp(logit);
        if (i == j) pos = logit;
      }
      total += std::log(z) - pos;
    }
  }
  const GroundingBatch batch({"a", "b", "c", "d"}, a, b);
  CHECK(infonce_text_traj(batch, 0.1) == doctest::Approx(total / 8.0).epsilon(1e-12));
}

TEST_CASE("oracle: velocity fixed point under full throttle") {
  const auto task = vel_track_task(1.0);
  std::vector<double> s{0.0};
  const std::vector<double> a{1.0};
  for (int t = 0; t < 400; ++t) s = env_step(task, s, a, 0).next_state;
  CHECK(s[0] == doctest::Approx(3.0).epsilon(1e-8));
}
