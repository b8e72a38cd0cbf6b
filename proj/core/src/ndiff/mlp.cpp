#include "tenet/ndiff/mlp.hpp"

#include "tenet/error.hpp"

namespace tenet::ndiff {

namespace {

template <typename Derived>
void apply_activation(Eigen::MatrixBase<Derived>& m, Activation a) {
  switch (a) {
    case Activation::tanh:
      m = m.array().tanh().matrix();
      break;
    case Activation::relu:
      m = m.array().max(typename Derived::Scalar(0)).matrix();
      break;
    case Activation::linear:
      break;
  }
}

}  // namespace

Mat mlp_forward_batch(const ParamVec& params, const Mat& inputs) {
  const auto& manifest = params.manifest();
  if (inputs.cols() != manifest.front().in) {
    throw ShapeError("layer '" + manifest.front().name + "' expects input dim " +
                     std::to_string(manifest.front().in) + ", got " + std::to_string(inputs.cols()));
  }
  Mat x = inputs;
  std::size_t off = 0;
  for (const auto& layer : manifest) {
    const double* base = params.values().data() + off;
    Eigen::Map<const Mat> w(base, layer.out, layer.in);
    Eigen::Map<const Eigen::RowVectorXd> b(base + static_cast<std::size_t>(layer.in) * layer.out, layer.out);
    Mat y(x.rows(), layer.out);
    y.noalias() = x * w.transpose();
    y.rowwise() += b;
    apply_activation(y, layer.activation);
    x = std::move(y);
    off += layer.param_count();
  }
  return x;
}

Vec mlp_forward(const ParamVec& params, std::span<const double> input) {
  Mat x(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = input[i];
  return mlp_forward_batch(params, x).row(0).transpose();
}

Var mlp(Tape& tape, Var x, Var weights, const Manifest& manifest, int row, std::size_t base_offset) {
  std::size_t off = base_offset;
  for (const auto& layer : manifest) {
    x = tape.affine(x, weights, row, off, layer.in, layer.out, layer.name);
    x = tape.activate(x, layer.activation);
    off += layer.param_count();
  }
  return x;
}

template <typename Scalar>
DenseController<Scalar>::DenseController(const ParamVec& params) {
  params.validate();
  input_dim_ = params.input_dim();
  output_dim_ = params.output_dim();
  std::size_t off = 0;
  for (const auto& layer : params.manifest()) {
    const double* base = params.values().data() + off;
    Eigen::Map<const Mat> w(base, layer.out, layer.in);
    Eigen::Map<const Vec> b(base + static_cast<std::size_t>(layer.in) * layer.out, layer.out);
    layers_.push_back({w.template cast<Scalar>(), b.template cast<Scalar>(), layer.activation});
    scratch_.emplace_back(layer.out);
    off += layer.param_count();
  }
}

template <typename Scalar>
void DenseController<Scalar>::forward(std::span<const Scalar> input, std::span<Scalar> out) {
  if (static_cast<int>(input.size()) != input_dim_ || static_cast<int>(out.size()) != output_dim_) {
    throw ShapeError("controller called with wrong input/output size");
  }
  Eigen::Map<const VecS> x0(input.data(), input_dim_);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& y = scratch_[i];
    if (i == 0) {
      y.noalias() = layers_[i].w * x0;
    } else {
      y.noalias() = layers_[i].w * scratch_[i - 1];
    }
    y += layers_[i].b;
    apply_activation(y, layers_[i].activation);
  }
  Eigen::Map<VecS>(out.data(), output_dim_) = scratch_.back();
}

template class DenseController<double>;
template class DenseController<float>;

}  // namespace tenet::ndiff
