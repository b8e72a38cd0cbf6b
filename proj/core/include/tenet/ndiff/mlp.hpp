#pragma once

#include <span>
#include <vector>

#include "tenet/ndiff/param_vec.hpp"
#include "tenet/ndiff/tape.hpp"

namespace tenet::ndiff {

// Evaluates the network described by params on one input vector.
Vec mlp_forward(const ParamVec& params, std::span<const double> input);

// Row-batched evaluation; inputs is N x input_dim.
Mat mlp_forward_batch(const ParamVec& params, const Mat& inputs);

// Records the same network on a tape. Weights are read from row `row` of
// `weights`, starting at `base_offset`, laid out as described by `manifest`.
Var mlp(Tape& tape, Var x, Var weights, const Manifest& manifest, int row = 0,
        std::size_t base_offset = 0);

// Allocation-free single-state evaluator used in control loops and latency
// benchmarks. Scalar selects the arithmetic precision.
template <typename Scalar>
class DenseController {
 public:
  explicit DenseController(const ParamVec& params);

  // Writes output_dim() values into out.
  void forward(std::span<const Scalar> input, std::span<Scalar> out);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

 private:
  using MatS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using VecS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  struct Layer {
    MatS w;
    VecS b;
    Activation activation;
  };
  std::vector<Layer> layers_;
  std::vector<VecS> scratch_;
  int input_dim_ = 0;
  int output_dim_ = 0;
};

extern template class DenseController<double>;
extern template class DenseController<float>;

}  // namespace tenet::ndiff
