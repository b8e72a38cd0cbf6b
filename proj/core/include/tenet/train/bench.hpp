#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "tenet/model/tenet_model.hpp"
#include "tenet/ndiff/param_vec.hpp"
#include "tenet/text/embedding.hpp"

namespace tenet {

enum class Precision { f64, f32 };
std::string_view to_string(Precision p);
Precision precision_from_string(std::string_view s);

struct BenchReport {
  std::size_t param_count = 0;
  int iterations = 0;
  Precision precision = Precision::f64;
  double median_ns = 0.0;
  double p99_ns = 0.0;
  double mean_ns = 0.0;
  // 1 / median latency.
  double hz = 0.0;
  // Iterations divided by the wall time of the whole timed loop.
  double sustained_hz = 0.0;
  // Text -> policy instantiation time, when measured (negative otherwise).
  double instantiate_ms = -1.0;
  nlohmann::json machine;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Times single-state forward passes of the controller on one thread, reusing
// one input so that only compute is measured. Requires iterations >= 10000;
// a warmup of iterations / 10 passes runs first.
BenchReport bench_controller(const ndiff::ParamVec& policy, int iterations, Precision precision = Precision::f64);

// Median wall time in milliseconds of text -> policy instantiation (embed,
// project, generate) over `repeats` calls.
double instantiation_ms(const TenetModel& model, std::string_view description, const TextEncoder& encoder,
                        int repeats = 21);

// CPU model, logical core count, compiler and build flags of this process.
nlohmann::json machine_info();

}  // namespace tenet
