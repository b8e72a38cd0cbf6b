#include "tenet/train/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <thread>
#include <vector>

#include "tenet/error.hpp"
#include "tenet/ndiff/mlp.hpp"
#include "tenet/train/policy_source.hpp"

namespace tenet {

std::string_view to_string(Precision p) { return p == Precision::f64 ? "f64" : "f32"; }

Precision precision_from_string(std::string_view s) {
  if (s == "f64") return Precision::f64;
  if (s == "f32") return Precision::f32;
  throw ConfigError("unknown precision '" + std::string(s) + "' (f64 or f32)");
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json j = {{"format", "tenet-bench-report"},
                      {"version", 1},
                      {"param_count", param_count},
                      {"iterations", iterations},
                      {"precision", to_string(precision)},
                      {"median_ns", median_ns},
                      {"p99_ns", p99_ns},
                      {"mean_ns", mean_ns},
                      {"hz", hz},
                      {"sustained_hz", sustained_hz},
                      {"machine", machine}};
  if (instantiate_ms >= 0.0) j["instantiate_ms"] = instantiate_ms;
  return j;
}

std::string BenchReport::to_csv() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "param_count,iterations,precision,median_ns,p99_ns,mean_ns,hz,sustained_hz,instantiate_ms\n"
                "%zu,%d,%s,%.1f,%.1f,%.1f,%.1f,%.1f,%.4f\n",
                param_count, iterations, std::string(to_string(precision)).c_str(), median_ns, p99_ns, mean_ns, hz,
                sustained_hz, instantiate_ms);
  return buf;
}

namespace {

template <typename Scalar>
BenchReport run(const ndiff::ParamVec& policy, int iterations) {
  using clock = std::chrono::steady_clock;
  ndiff::DenseController<Scalar> ctrl(policy);
  std::vector<Scalar> in(static_cast<std::size_t>(ctrl.input_dim()));
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = static_cast<Scalar>(0.1 * static_cast<double>(i + 1));
  std::vector<Scalar> out(static_cast<std::size_t>(ctrl.output_dim()));
  volatile Scalar sink = 0;
  for (int i = 0; i < std::max(1000, iterations / 10); ++i) {
    ctrl.forward(in, out);
    sink = sink + out[0];
  }
  std::vector<double> ns(static_cast<std::size_t>(iterations));
  const auto start = clock::now();
  for (int i = 0; i < iterations; ++i) {
    const auto t0 = clock::now();
    ctrl.forward(in, out);
    const auto t1 = clock::now();
    sink = sink + out[0];
    ns[static_cast<std::size_t>(i)] = std::chrono::duration<double, std::nano>(t1 - t0).count();
  }
  const double total = std::chrono::duration<double>(clock::now() - start).count();
  BenchReport r;
  r.param_count = policy.size();
  r.iterations = iterations;
  r.mean_ns = std::accumulate(ns.begin(), ns.end(), 0.0) / static_cast<double>(ns.size());
  std::sort(ns.begin(), ns.end());
  r.median_ns = ns[ns.size() / 2];
  r.p99_ns = ns[std::min(ns.size() - 1, static_cast<std::size_t>(0.99 * static_cast<double>(ns.size())))];
  r.hz = 1e9 / r.median_ns;
  r.sustained_hz = static_cast<double>(iterations) / total;
  return r;
}

}  // namespace

BenchReport bench_controller(const ndiff::ParamVec& policy, int iterations, Precision precision) {
  if (iterations < 10000) throw ConfigError("bench_controller needs at least 10000 iterations");
  BenchReport r = precision == Precision::f64 ? run<double>(policy, iterations) : run<float>(policy, iterations);
  r.precision = precision;
  r.machine = machine_info();
  return r;
}

double instantiation_ms(const TenetModel& model, std::string_view description, const TextEncoder& encoder,
                        int repeats) {
  if (repeats < 1) throw ConfigError("instantiation_ms needs at least one repeat");
  std::vector<double> ms;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = instantiate(model, description, encoder);
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    if (p.size() == 0) throw ShapeError("instantiation produced an empty policy");
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

nlohmann::json machine_info() {
  std::string cpu = "unknown";
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
#if defined(__VERSION__)
  const std::string compiler = __VERSION__;
#else
  const std::string compiler = "unknown";
#endif
#if defined(NDEBUG)
  const bool optimized = true;
#else
  const bool optimized = false;
#endif
  return {{"cpu", cpu},
          {"logical_cpus", std::thread::hardware_concurrency()},
          {"compiler", compiler},
          {"ndebug", optimized},
          {"threads_used", 1}};
}

}  // namespace tenet
