#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tenet/ndiff/param_vec.hpp"

namespace tenet::ndiff {

// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  int id() const { return id_; }
  bool valid() const { return id_ >= 0; }

 private:
  friend class Tape;
  explicit Var(int id) : id_(id) {}
  int id_ = -1;
};

enum class Primitive {
  leaf,
  affine,
  tanh,
  relu,
  square,
  exp,
  log,
  add,
  sub,
  mul,
  scale,
  sum,
  mean,
  mean_rows,
  row,
  stack_rows,
  broadcast_rows,
  concat_cols,
  transpose,
  dot_rows,
  cosine_similarity,
  softmax_cross_entropy,
  opaque,
};

std::string_view to_string(Primitive p);

// Reverse-mode tape over matrix-valued nodes. Every node value is a row-major
// matrix whose rows are batch items. Values are checked for finiteness as they
// are recorded; backward() accumulates gradients for every node that depends
// on a tracked leaf.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Untracked input.
  Var constant(Mat value);
  // Tracked leaf holding an arbitrary matrix.
  Var variable(Mat value);
  // Tracked leaf holding a flat parameter vector as a 1 x P row.
  Var parameter(const ParamVec& params);

  // y = x W^T + b where W (out x in, row-major) and b (out) are read from row
  // `row` of `weights` starting at `offset`. `weights` may be a parameter leaf
  // or the output of another network (hypernetwork emission).
  Var affine(Var x, Var weights, int row, std::size_t offset, int in, int out,
             std::string_view layer_name = {});
  Var activate(Var x, Activation a);

  Var tanh(Var x);
  Var relu(Var x);
  Var square(Var x);
  Var exp(Var x);
  Var log(Var x);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, double k);

  Var sum(Var x);        // 1 x 1
  Var mean(Var x);       // 1 x 1
  Var mean_rows(Var x);  // 1 x cols, average over rows

  Var row(Var x, int r);
  Var stack_rows(std::span<const Var> parts);
  Var broadcast_rows(Var x, int rows);  // 1 x C -> rows x C
  Var concat_cols(Var a, Var b);
  Var transpose(Var x);

  Var dot_rows(Var a, Var b);  // rows x 1, rowwise inner products
  // S(i, j) = cos(a_i, b_j); a and b may be the same node.
  Var cosine_similarity(Var a, Var b);
  // Mean over rows of -log softmax(logits_i)[targets_i].
  Var softmax_cross_entropy(Var logits, std::vector<int> targets);

  // Forward-only elementwise transform. Backward through it is a CapabilityError.
  Var opaque(std::string name, Var x, std::function<Mat(const Mat&)> fn);

  const Mat& value(Var v) const;
  double scalar(Var v) const;
  std::size_t op_count() const { return ops_; }
  std::size_t node_count() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and replays the recorded ops in reverse.
  void backward(Var loss);
  // Accumulated gradient; zeros of the node's shape when nothing reached it.
  const Mat& grad(Var v);

 private:
  struct Node {
    Primitive op = Primitive::leaf;
    int a = -1;
    int b = -1;
    Mat value;
    bool tracked = false;
    int row = 0;
    std::size_t offset = 0;
    int in = 0;
    int out = 0;
    double k = 0.0;
    std::vector<int> parts;
    std::vector<int> targets;
    Mat cache;
    Eigen::VectorXd norms_a;
    Eigen::VectorXd norms_b;
    std::string name;
    std::function<Mat(const Mat&)> fn;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  Mat& grad_slot(int id);
  void backward_node(int id);

  std::vector<Node> nodes_;
  std::vector<Mat> grads_;
  std::vector<char> has_grad_;
  std::size_t ops_ = 0;
};

// Scalar loss of one parameter vector, expressed on a tape.
using LossFn = std::function<Var(Tape&, Var params)>;

double evaluate_loss(const LossFn& loss_fn, const ParamVec& at);
// Gradient of loss_fn at `at`, same manifest as `at`.
ParamVec grad(const LossFn& loss_fn, const ParamVec& at);

}  // namespace tenet::ndiff
