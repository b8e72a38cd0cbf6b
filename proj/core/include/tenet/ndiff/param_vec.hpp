#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tenet {
class Rng;
}

namespace tenet::ndiff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { tanh, relu, linear };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

// One dense layer: y = act(W x + b), W stored row-major (out x in) followed by b.
struct LayerShape {
  std::string name;
  int in = 0;
  int out = 0;
  Activation activation = Activation::linear;

  std::size_t param_count() const {
    return static_cast<std::size_t>(in) * static_cast<std::size_t>(out) + static_cast<std::size_t>(out);
  }
  bool operator==(const LayerShape&) const = default;
};

using Manifest = std::vector<LayerShape>;

std::size_t count_params(const Manifest& manifest);

// Builds prefix/0, prefix/1, ... layers. Hidden layers use hidden_act, the
// last layer output_act.
Manifest mlp_manifest(std::string_view prefix, int in, std::span<const int> hidden, int out,
                      Activation hidden_act, Activation output_act);

// Throws ShapeError if consecutive layers do not chain or a dimension is not positive.
void check_manifest(const Manifest& manifest);

// Flat parameter vector plus the layer layout that gives it meaning.
class ParamVec {
 public:
  ParamVec() = default;
  ParamVec(Manifest manifest, Vec values);

  static ParamVec zeros(Manifest manifest);

  const Manifest& manifest() const { return manifest_; }
  const Vec& values() const { return values_; }
  Vec& values() { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  int input_dim() const { return manifest_.front().in; }
  int output_dim() const { return manifest_.back().out; }

  // Offset of layer i's weight block in values().
  std::size_t offset_of(std::size_t layer) const;

  // Length, activation and finiteness invariants; throws on violation.
  void validate() const;

  bool operator==(const ParamVec& other) const;

 private:
  Manifest manifest_;
  Vec values_;
};

// Uniform in +-scale*sqrt(6/(fan_in+fan_out)) for weights, zero biases.
void glorot_init(ParamVec& params, Rng& rng, double scale = 1.0);
// Initializes only layer `layer`.
void glorot_init_layer(ParamVec& params, std::size_t layer, Rng& rng, double scale = 1.0);

}  // namespace tenet::ndiff
