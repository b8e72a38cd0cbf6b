#include "tenet/ndiff/param_vec.hpp"

#include <cmath>

#include "tenet/error.hpp"
#include "tenet/rng.hpp"

namespace tenet::ndiff {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::relu:
      return "relu";
    case Activation::linear:
      return "linear";
  }
  return "linear";
}

Activation activation_from_string(std::string_view s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  throw ShapeError("unknown activation tag '" + std::string(s) + "'");
}

std::size_t count_params(const Manifest& manifest) {
  std::size_t n = 0;
  for (const auto& layer : manifest) n += layer.param_count();
  return n;
}

Manifest mlp_manifest(std::string_view prefix, int in, std::span<const int> hidden, int out,
                      Activation hidden_act, Activation output_act) {
  Manifest m;
  int prev = in;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    m.push_back({std::string(prefix) + "/" + std::to_string(i), prev, hidden[i], hidden_act});
    prev = hidden[i];
  }
  m.push_back({std::string(prefix) + "/" + std::to_string(hidden.size()), prev, out, output_act});
  return m;
}

void check_manifest(const Manifest& manifest) {
  if (manifest.empty()) throw ShapeError("empty manifest");
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& layer = manifest[i];
    if (layer.in <= 0 || layer.out <= 0) {
      throw ShapeError("layer '" + layer.name + "' has a non-positive dimension");
    }
    if (i > 0 && manifest[i - 1].out != layer.in) {
      throw ShapeError("layer '" + layer.name + "' expects " + std::to_string(layer.in) +
                       " inputs but previous layer emits " + std::to_string(manifest[i - 1].out));
    }
  }
}

ParamVec::ParamVec(Manifest manifest, Vec values)
    : manifest_(std::move(manifest)), values_(std::move(values)) {
  validate();
}

ParamVec ParamVec::zeros(Manifest manifest) {
  check_manifest(manifest);
  const auto n = static_cast<Eigen::Index>(count_params(manifest));
  return ParamVec(std::move(manifest), Vec::Zero(n));
}

std::size_t ParamVec::offset_of(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < layer; ++i) off += manifest_[i].param_count();
  return off;
}

void ParamVec::validate() const {
  check_manifest(manifest_);
  const std::size_t expected = count_params(manifest_);
  if (size() != expected) {
    throw ShapeError("parameter vector has " + std::to_string(size()) + " values but manifest needs " +
                     std::to_string(expected));
  }
  if (!values_.allFinite()) throw NumericError("parameter vector contains non-finite values");
}

bool ParamVec::operator==(const ParamVec& other) const {
  return manifest_ == other.manifest_ && values_.size() == other.values_.size() &&
         (values_.array() == other.values_.array()).all();
}

void glorot_init_layer(ParamVec& params, std::size_t layer, Rng& rng, double scale) {
  const auto& shape = params.manifest().at(layer);
  const double limit = scale * std::sqrt(6.0 / static_cast<double>(shape.in + shape.out));
  const auto off = static_cast<Eigen::Index>(params.offset_of(layer));
  const auto nw = static_cast<Eigen::Index>(shape.in) * shape.out;
  auto& v = params.values();
  for (Eigen::Index i = 0; i < nw; ++i) v[off + i] = rng.uniform(-limit, limit);
  for (Eigen::Index i = 0; i < shape.out; ++i) v[off + nw + i] = 0.0;
}

void glorot_init(ParamVec& params, Rng& rng, double scale) {
  for (std::size_t i = 0; i < params.manifest().size(); ++i) glorot_init_layer(params, i, rng, scale);
}

}  // namespace tenet::ndiff
