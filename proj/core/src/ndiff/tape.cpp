#include "tenet/ndiff/tape.hpp"

#include <algorithm>
#include <cmath>

#include "tenet/error.hpp"

namespace tenet::ndiff {

namespace {

constexpr double kNormFloor = 1e-12;

using RowMap = Eigen::Map<const Mat>;
using MutRowMap = Eigen::Map<Mat>;

void require_same_shape(const Mat& a, const Mat& b, std::string_view op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

// Single vectorized pass: x * 0 is NaN exactly when x is not finite.
bool all_finite(const Mat& m) { return !std::isnan((m.array() * 0.0).sum()); }

}  // namespace

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::leaf: return "leaf";
    case Primitive::affine: return "affine";
    case Primitive::tanh: return "tanh";
    case Primitive::relu: return "relu";
    case Primitive::square: return "square";
    case Primitive::exp: return "exp";
    case Primitive::log: return "log";
    case Primitive::add: return "add";
    case Primitive::sub: return "sub";
    case Primitive::mul: return "mul";
    case Primitive::scale: return "scale";
    case Primitive::sum: return "sum";
    case Primitive::mean: return "mean";
    case Primitive::mean_rows: return "mean_rows";
    case Primitive::row: return "row";
    case Primitive::stack_rows: return "stack_rows";
    case Primitive::broadcast_rows: return "broadcast_rows";
    case Primitive::concat_cols: return "concat_cols";
    case Primitive::transpose: return "transpose";
    case Primitive::dot_rows: return "dot_rows";
    case Primitive::cosine_similarity: return "cosine_similarity";
    case Primitive::softmax_cross_entropy: return "softmax_cross_entropy";
    case Primitive::opaque: return "opaque";
  }
  return "unknown";
}

Var Tape::push(Node n) {
  if (!all_finite(n.value)) {
    std::string what = n.name.empty() ? std::string(to_string(n.op)) : n.name;
    throw NumericError("non-finite value produced by '" + what + "'");
  }
  if (n.op != Primitive::leaf) ++ops_;
  nodes_.push_back(std::move(n));
  return Var(static_cast<int>(nodes_.size()) - 1);
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id() < 0 || static_cast<std::size_t>(v.id()) >= nodes_.size()) {
    throw ShapeError("variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.id())];
}

const Mat& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar(Var v) const {
  const Mat& m = value(v);
  if (m.size() != 1) throw ShapeError("value is not a scalar");
  return m(0, 0);
}

Var Tape::constant(Mat value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Mat value) {
  Node n;
  n.value = std::move(value);
  n.tracked = true;
  return push(std::move(n));
}

Var Tape::parameter(const ParamVec& params) {
  Node n;
  n.value = params.values().transpose();
  n.tracked = true;
  return push(std::move(n));
}

Var Tape::affine(Var x, Var weights, int row, std::size_t offset, int in, int out,
                 std::string_view layer_name) {
  const Node& xn = node(x);
  const Node& wn = node(weights);
  const std::string name = layer_name.empty() ? std::string("affine") : std::string(layer_name);
  if (xn.value.cols() != in) {
    throw ShapeError("layer '" + name + "' expects input dim " + std::to_string(in) + ", got " +
                     std::to_string(xn.value.cols()));
  }
  const std::size_t need = offset + static_cast<std::size_t>(in) * out + out;
  if (row < 0 || row >= wn.value.rows() || need > static_cast<std::size_t>(wn.value.cols())) {
    throw ShapeError("layer '" + name + "' reads past the end of its weight source");
  }
  const double* base = wn.value.row(row).data() + offset;
  RowMap w(base, out, in);
  Eigen::Map<const Eigen::RowVectorXd> b(base + static_cast<std::size_t>(in) * out, out);
  Node n;
  n.op = Primitive::affine;
  n.a = x.id();
  n.b = weights.id();
  n.row = row;
  n.offset = offset;
  n.in = in;
  n.out = out;
  n.name = name;
  n.value.resize(xn.value.rows(), out);
  n.value.noalias() = xn.value * w.transpose();
  n.value.rowwise() += b;
  n.tracked = xn.tracked || wn.tracked;
  return push(std::move(n));
}

Var Tape::activate(Var x, Activation a) {
  switch (a) {
    case Activation::tanh: return tanh(x);
    case Activation::relu: return relu(x);
    case Activation::linear: return x;
  }
  return x;
}

#define TENET_UNARY(fn, prim, expr)      \
  Var Tape::fn(Var x) {                  \
    const Node& xn = node(x);            \
    Node n;                              \
    n.op = Primitive::prim;              \
    n.a = x.id();                        \
    n.tracked = xn.tracked;              \
    const auto& X = xn.value;            \
    n.value = (expr);                    \
    return push(std::move(n));           \
  }

TENET_UNARY(tanh, tanh, X.array().tanh().matrix())
TENET_UNARY(relu, relu, X.array().max(0.0).matrix())
TENET_UNARY(square, square, X.array().square().matrix())
TENET_UNARY(exp, exp, X.array().exp().matrix())
TENET_UNARY(log, log, X.array().log().matrix())

#undef TENET_UNARY

Var Tape::add(Var a, Var b) {
  const Node& an = node(a);
  const Node& bn = node(b);
  require_same_shape(an.value, bn.value, "add");
  Node n;
  n.op = Primitive::add;
  n.a = a.id();
  n.b = b.id();
  n.tracked = an.tracked || bn.tracked;
  n.value = an.value + bn.value;
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Node& an = node(a);
  const Node& bn = node(b);
  require_same_shape(an.value, bn.value, "sub");
  Node n;
  n.op = Primitive::sub;
  n.a = a.id();
  n.b = b.id();
  n.tracked = an.tracked || bn.tracked;
  n.value = an.value - bn.value;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Node& an = node(a);
  const Node& bn = node(b);
  require_same_shape(an.value, bn.value, "mul");
  Node n;
  n.op = Primitive::mul;
  n.a = a.id();
  n.b = b.id();
  n.tracked = an.tracked || bn.tracked;
  n.value = an.value.cwiseProduct(bn.value);
  return push(std::move(n));
}

Var Tape::scale(Var x, double k) {
  const Node& xn = node(x);
  Node n;
  n.op = Primitive::scale;
  n.a = x.id();
  n.k = k;
  n.tracked = xn.tracked;
  n.value = xn.value * k;
  return push(std::move(n));
}

Var Tape::sum(Var x) {
  const Node& xn = node(x);
  Node n;
  n.op = Primitive::sum;
  n.a = x.id();
  n.tracked = xn.tracked;
  n.value = Mat::Constant(1, 1, xn.value.sum());
  return push(std::move(n));
}

Var Tape::mean(Var x) {
  const Node& xn = node(x);
  if (xn.value.size() == 0) throw ShapeError("mean of an empty matrix");
  Node n;
  n.op = Primitive::mean;
  n.a = x.id();
  n.tracked = xn.tracked;
  n.value = Mat::Constant(1, 1, xn.value.mean());
  return push(std::move(n));
}

Var Tape::mean_rows(Var x) {
  const Node& xn = node(x);
  if (xn.value.rows() == 0) throw ShapeError("mean_rows of a matrix with no rows");
  Node n;
  n.op = Primitive::mean_rows;
  n.a = x.id();
  n.tracked = xn.tracked;
  n.value = xn.value.colwise().mean();
  return push(std::move(n));
}

Var Tape::row(Var x, int r) {
  const Node& xn = node(x);
  if (r < 0 || r >= xn.value.rows()) throw ShapeError("row index out of range");
  Node n;
  n.op = Primitive::row;
  n.a = x.id();
  n.row = r;
  n.tracked = xn.tracked;
  n.value = xn.value.row(r);
  return push(std::move(n));
}

Var Tape::stack_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("stack_rows of nothing");
  const auto cols = value(parts.front()).cols();
  Eigen::Index rows = 0;
  Node n;
  n.op = Primitive::stack_rows;
  for (Var p : parts) {
    const Node& pn = node(p);
    if (pn.value.cols() != cols) throw ShapeError("stack_rows: column count mismatch");
    rows += pn.value.rows();
    n.parts.push_back(p.id());
    n.tracked = n.tracked || pn.tracked;
  }
  n.value.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Mat& v = value(p);
    n.value.middleRows(at, v.rows()) = v;
    at += v.rows();
  }
  return push(std::move(n));
}

Var Tape::broadcast_rows(Var x, int rows) {
  const Node& xn = node(x);
  if (xn.value.rows() != 1) throw ShapeError("broadcast_rows expects a single row");
  Node n;
  n.op = Primitive::broadcast_rows;
  n.a = x.id();
  n.tracked = xn.tracked;
  n.value = xn.value.replicate(rows, 1);
  return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
  const Node& an = node(a);
  const Node& bn = node(b);
  if (an.value.rows() != bn.value.rows()) throw ShapeError("concat_cols: row count mismatch");
  Node n;
  n.op = Primitive::concat_cols;
  n.a = a.id();
  n.b = b.id();
  n.tracked = an.tracked || bn.tracked;
  n.value.resize(an.value.rows(), an.value.cols() + bn.value.cols());
  n.value << an.value, bn.value;
  return push(std::move(n));
}

Var Tape::transpose(Var x) {
  const Node& xn = node(x);
  Node n;
  n.op = Primitive::transpose;
  n.a = x.id();
  n.tracked = xn.tracked;
  n.value = xn.value.transpose();
  return push(std::move(n));
}

Var Tape::dot_rows(Var a, Var b) {
  const Node& an = node(a);
  const Node& bn = node(b);
  require_same_shape(an.value, bn.value, "dot_rows");
  Node n;
  n.op = Primitive::dot_rows;
  n.a = a.id();
  n.b = b.id();
  n.tracked = an.tracked || bn.tracked;
  n.value = an.value.cwiseProduct(bn.value).rowwise().sum();
  return push(std::move(n));
}

Var Tape::cosine_similarity(Var a, Var b) {
  const Node& an = node(a);
  const Node& bn = node(b);
  if (an.value.cols() != bn.value.cols()) throw ShapeError("cosine_similarity: dimension mismatch");
  Node n;
  n.op = Primitive::cosine_similarity;
  n.a = a.id();
  n.b = b.id();
  n.tracked = an.tracked || bn.tracked;
  n.norms_a = an.value.rowwise().norm();
  n.norms_b = bn.value.rowwise().norm();
  const Mat a_hat = n.norms_a.cwiseMax(kNormFloor).cwiseInverse().asDiagonal() * an.value;
  const Mat b_hat = n.norms_b.cwiseMax(kNormFloor).cwiseInverse().asDiagonal() * bn.value;
  n.value.noalias() = a_hat * b_hat.transpose();
  return push(std::move(n));
}

Var Tape::softmax_cross_entropy(Var logits, std::vector<int> targets) {
  const Node& ln = node(logits);
  const Mat& L = ln.value;
  if (static_cast<Eigen::Index>(targets.size()) != L.rows()) {
    throw ShapeError("softmax_cross_entropy: one target per row required");
  }
  Node n;
  n.op = Primitive::softmax_cross_entropy;
  n.a = logits.id();
  n.tracked = ln.tracked;
  n.cache.resize(L.rows(), L.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const int t = targets[static_cast<std::size_t>(i)];
    if (t < 0 || t >= L.cols()) throw ShapeError("softmax_cross_entropy: target out of range");
    Eigen::Index k = 0;
    const double m = L.row(i).maxCoeff(&k);
    const Eigen::RowVectorXd e = (L.row(i).array() - m).exp().matrix();
    // log z = log1p(sum of the non-max terms) keeps tiny losses accurate.
    double rest = 0.0;
    for (Eigen::Index j = 0; j < e.size(); ++j) rest += j == k ? 0.0 : e(j);
    n.cache.row(i) = e / (1.0 + rest);
    total += (m - L(i, t)) + std::log1p(rest);
  }
  n.targets = std::move(targets);
  n.value = Mat::Constant(1, 1, total / static_cast<double>(L.rows()));
  return push(std::move(n));
}

Var Tape::opaque(std::string name, Var x, std::function<Mat(const Mat&)> fn) {
  const Node& xn = node(x);
  Node n;
  n.op = Primitive::opaque;
  n.a = x.id();
  n.tracked = xn.tracked;
  n.value = fn(xn.value);
  n.name = std::move(name);
  n.fn = std::move(fn);
  return push(std::move(n));
}

Mat& Tape::grad_slot(int id) {
  const auto i = static_cast<std::size_t>(id);
  if (!has_grad_[i]) {
    grads_[i] = Mat::Zero(nodes_[i].value.rows(), nodes_[i].value.cols());
    has_grad_[i] = 1;
  }
  return grads_[i];
}

const Mat& Tape::grad(Var v) {
  node(v);
  if (grads_.size() != nodes_.size()) {
    grads_.resize(nodes_.size());
    has_grad_.resize(nodes_.size(), 0);
  }
  return grad_slot(v.id());
}

void Tape::backward(Var loss) {
  if (value(loss).size() != 1) throw ShapeError("backward requires a scalar loss");
  grads_.assign(nodes_.size(), Mat());
  has_grad_.assign(nodes_.size(), 0);
  grad_slot(loss.id())(0, 0) = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    const auto i = static_cast<std::size_t>(id);
    if (!has_grad_[i] || !nodes_[i].tracked || nodes_[i].op == Primitive::leaf) continue;
    backward_node(id);
  }
}

void Tape::backward_node(int id) {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  const Mat& dy = grads_[static_cast<std::size_t>(id)];
  auto tracked = [&](int j) { return j >= 0 && nodes_[static_cast<std::size_t>(j)].tracked; };
  auto in_value = [&](int j) -> const Mat& { return nodes_[static_cast<std::size_t>(j)].value; };

  switch (n.op) {
    case Primitive::leaf:
      break;
    case Primitive::affine: {
      const Mat& x = in_value(n.a);
      const Mat& wsrc = in_value(n.b);
      const double* base = wsrc.row(n.row).data() + n.offset;
      RowMap w(base, n.out, n.in);
      if (tracked(n.a)) grad_slot(n.a).noalias() += dy * w;
      if (tracked(n.b)) {
        double* gbase = grad_slot(n.b).row(n.row).data() + n.offset;
        MutRowMap gw(gbase, n.out, n.in);
        gw.noalias() += dy.transpose() * x;
        Eigen::Map<Eigen::RowVectorXd> gb(gbase + static_cast<std::size_t>(n.in) * n.out, n.out);
        gb += dy.colwise().sum();
      }
      break;
    }
    case Primitive::tanh:
      if (tracked(n.a)) grad_slot(n.a).array() += dy.array() * (1.0 - n.value.array().square());
      break;
    case Primitive::relu:
      if (tracked(n.a)) {
        grad_slot(n.a).array() += dy.array() * (in_value(n.a).array() > 0.0).cast<double>();
      }
      break;
    case Primitive::square:
      if (tracked(n.a)) grad_slot(n.a).array() += 2.0 * in_value(n.a).array() * dy.array();
      break;
    case Primitive::exp:
      if (tracked(n.a)) grad_slot(n.a).array() += dy.array() * n.value.array();
      break;
    case Primitive::log:
      if (tracked(n.a)) grad_slot(n.a).array() += dy.array() / in_value(n.a).array();
      break;
    case Primitive::add:
      if (tracked(n.a)) grad_slot(n.a) += dy;
      if (tracked(n.b)) grad_slot(n.b) += dy;
      break;
    case Primitive::sub:
      if (tracked(n.a)) grad_slot(n.a) += dy;
      if (tracked(n.b)) grad_slot(n.b) -= dy;
      break;
    case Primitive::mul:
      if (tracked(n.a)) grad_slot(n.a).array() += dy.array() * in_value(n.b).array();
      if (tracked(n.b)) grad_slot(n.b).array() += dy.array() * in_value(n.a).array();
      break;
    case Primitive::scale:
      if (tracked(n.a)) grad_slot(n.a) += n.k * dy;
      break;
    case Primitive::sum:
      if (tracked(n.a)) grad_slot(n.a).array() += dy(0, 0);
      break;
    case Primitive::mean:
      if (tracked(n.a)) {
        grad_slot(n.a).array() += dy(0, 0) / static_cast<double>(in_value(n.a).size());
      }
      break;
    case Primitive::mean_rows:
      if (tracked(n.a)) {
        const auto rows = in_value(n.a).rows();
        grad_slot(n.a).rowwise() += dy.row(0) / static_cast<double>(rows);
      }
      break;
    case Primitive::row:
      if (tracked(n.a)) grad_slot(n.a).row(n.row) += dy.row(0);
      break;
    case Primitive::stack_rows: {
      Eigen::Index at = 0;
      for (int p : n.parts) {
        const auto rows = in_value(p).rows();
        if (tracked(p)) grad_slot(p) += dy.middleRows(at, rows);
        at += rows;
      }
      break;
    }
    case Primitive::broadcast_rows:
      if (tracked(n.a)) grad_slot(n.a) += dy.colwise().sum();
      break;
    case Primitive::concat_cols: {
      const auto ca = in_value(n.a).cols();
      const auto cb = in_value(n.b).cols();
      if (tracked(n.a)) grad_slot(n.a) += dy.leftCols(ca);
      if (tracked(n.b)) grad_slot(n.b) += dy.rightCols(cb);
      break;
    }
    case Primitive::transpose:
      if (tracked(n.a)) grad_slot(n.a) += dy.transpose();
      break;
    case Primitive::dot_rows:
      if (tracked(n.a)) grad_slot(n.a) += dy.col(0).asDiagonal() * in_value(n.b);
      if (tracked(n.b)) grad_slot(n.b) += dy.col(0).asDiagonal() * in_value(n.a);
      break;
    case Primitive::cosine_similarity: {
      const Mat& A = in_value(n.a);
      const Mat& B = in_value(n.b);
      const Eigen::VectorXd inv_a = n.norms_a.cwiseMax(kNormFloor).cwiseInverse();
      const Eigen::VectorXd inv_b = n.norms_b.cwiseMax(kNormFloor).cwiseInverse();
      const Mat a_hat = inv_a.asDiagonal() * A;
      const Mat b_hat = inv_b.asDiagonal() * B;
      // Gradient of a normalized row u = x/|x| is (I - u u^T)/|x| applied to du.
      auto through_norm = [](const Mat& du, const Mat& u, const Eigen::VectorXd& inv,
                             const Eigen::VectorXd& norms) {
        Mat dx = du - (du.cwiseProduct(u).rowwise().sum()).asDiagonal() * u;
        for (Eigen::Index i = 0; i < dx.rows(); ++i) {
          if (norms[i] < kNormFloor) dx.row(i) = du.row(i);  // floor branch: plain scaling
        }
        return Mat(inv.asDiagonal() * dx);
      };
      if (tracked(n.a)) {
        const Mat du = dy * b_hat;
        grad_slot(n.a) += through_norm(du, a_hat, inv_a, n.norms_a);
      }
      if (tracked(n.b)) {
        const Mat du = dy.transpose() * a_hat;
        grad_slot(n.b) += through_norm(du, b_hat, inv_b, n.norms_b);
      }
      break;
    }
    case Primitive::softmax_cross_entropy:
      if (tracked(n.a)) {
        Mat d = n.cache;
        for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, n.targets[static_cast<std::size_t>(i)]) -= 1.0;
        grad_slot(n.a) += (dy(0, 0) / static_cast<double>(d.rows())) * d;
      }
      break;
    case Primitive::opaque:
      throw CapabilityError("no reverse rule for forward-only operation '" + n.name + "'");
  }
}

double evaluate_loss(const LossFn& loss_fn, const ParamVec& at) {
  Tape tape;
  const Var p = tape.parameter(at);
  return tape.scalar(loss_fn(tape, p));
}

ParamVec grad(const LossFn& loss_fn, const ParamVec& at) {
  Tape tape;
  const Var p = tape.parameter(at);
  const Var loss = loss_fn(tape, p);
  tape.backward(loss);
  Vec g = tape.grad(p).row(0).transpose();
  if (!g.allFinite()) throw NumericError("gradient contains non-finite entries");
  return ParamVec(at.manifest(), std::move(g));
}

}  // namespace tenet::ndiff
