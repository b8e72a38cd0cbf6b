#include <benchmark/benchmark.h>

#include <vector>

#include "tenet/model/tenet_model.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/rng.hpp"
#include "tenet/text/embedding.hpp"
#include "tenet/train/policy_source.hpp"

namespace {

tenet::ndiff::ParamVec random_controller(int width) {
  const std::vector<int> hidden{width, width};
  auto p = tenet::ndiff::ParamVec::zeros(tenet::ndiff::mlp_manifest(
      "pi", 4, hidden, 2, tenet::ndiff::Activation::tanh, tenet::ndiff::Activation::tanh));
  tenet::Rng rng(7);
  tenet::ndiff::glorot_init(p, rng);
  return p;
}

template <typename Scalar>
void bm_forward(benchmark::State& state) {
  const auto params = random_controller(static_cast<int>(state.range(0)));
  tenet::ndiff::DenseController<Scalar> ctrl(params);
  std::vector<Scalar> in{Scalar(0.1), Scalar(-0.2), Scalar(0.3), Scalar(0.05)};
  std::vector<Scalar> out(2);
  for (auto _ : state) {
    ctrl.forward(in, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.counters["params"] = static_cast<double>(params.size());
  state.counters["Hz"] = benchmark::Counter(static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(bm_forward<double>)->Name("forward_f64")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_forward<float>)->Name("forward_f32")->Arg(64)->Arg(128)->Arg(256);

void bm_instantiate(benchmark::State& state) {
  tenet::ModelConfig config;
  const auto model = tenet::TenetModel::initialize(config, 3);
  const tenet::HashEmbedder encoder(config.d_z);
  const std::string text = "Move to the waypoint at (0.800, 0.000).";
  for (auto _ : state) {
    auto p = tenet::instantiate(model, text, encoder);
    benchmark::DoNotOptimize(p.values().data());
  }
}
BENCHMARK(bm_instantiate)->Unit(benchmark::kMicrosecond);

void bm_embed(benchmark::State& state) {
  const tenet::HashEmbedder encoder(256);
  const std::string text = "Move forward with target velocity 1.200 m/s.";
  for (auto _ : state) {
    auto e = encoder.embed(text);
    benchmark::DoNotOptimize(e.values.data());
  }
}
BENCHMARK(bm_embed);

}  // namespace

BENCHMARK_MAIN();
