#include "tenet/model/losses.hpp"

#include <set>

#include "tenet/error.hpp"
#include "tenet/ndiff/mlp.hpp"

namespace tenet {

using ndiff::Mat;
using ndiff::Tape;
using ndiff::Var;
using ndiff::Vec;

GroundingBatch::GroundingBatch(std::vector<std::string> ids, Mat text_, Mat traj_)
    : task_ids(std::move(ids)), text(std::move(text_)), traj(std::move(traj_)) {
  const auto b = static_cast<Eigen::Index>(task_ids.size());
  if (text.rows() != b || traj.rows() != b) throw ShapeError("grounding batch needs one row per task id");
  if (text.cols() != traj.cols()) throw ShapeError("text and trajectory embeddings differ in dimension");
  std::set<std::string> seen;
  for (const auto& id : task_ids) {
    if (!seen.insert(id).second) throw ConfigError("grounding batch repeats task '" + id + "'");
  }
}

namespace losses {

namespace {

std::vector<int> diagonal(Eigen::Index n) {
  std::vector<int> t(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<int>(i);
  return t;
}

void require_negatives(Eigen::Index b) {
  if (b < 2) throw ConfigError("contrastive losses need a batch of at least 2 tasks");
}

Mat stack_vectors(const TrainBatch& batch, Vec BatchEntry::*field) {
  const auto& first = batch.entries.front().*field;
  Mat m(static_cast<Eigen::Index>(batch.entries.size()), first.size());
  for (std::size_t i = 0; i < batch.entries.size(); ++i) {
    const Vec& v = batch.entries[i].*field;
    if (v.size() != first.size()) throw ShapeError("batch embeddings differ in dimension");
    m.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  return m;
}

Mat stack_mats(const TrainBatch& batch, Mat BatchEntry::*field) {
  Eigen::Index rows = 0;
  const auto cols = (batch.entries.front().*field).cols();
  for (const auto& e : batch.entries) {
    if ((e.*field).cols() != cols) throw ShapeError("batch entries differ in width");
    rows += (e.*field).rows();
  }
  Mat m(rows, cols);
  Eigen::Index at = 0;
  for (const auto& e : batch.entries) {
    m.middleRows(at, (e.*field).rows()) = e.*field;
    at += (e.*field).rows();
  }
  return m;
}

Var encode(Tape& t, Var traj, const ModelConfig& c, const TrainBatch& batch) {
  const auto feat = traj_feature_manifest(c);
  const auto head = traj_head_manifest(c);
  std::vector<Var> pooled;
  for (const auto& e : batch.entries) {
    if (e.trajectory.rows() == 0) throw InputError("batch entry '" + e.task_id + "' has an empty trajectory");
    const Var x = ndiff::mlp(t, t.constant(e.trajectory), traj, feat, 0, 0);
    pooled.push_back(t.mean_rows(x));
  }
  return ndiff::mlp(t, t.stack_rows(pooled), traj, head, 0, ndiff::count_params(feat));
}

// Runs the row-i generated policy on entry i's states and stacks the outputs.
Var generated_actions(Tape& t, Var theta, const ndiff::Manifest& pi, const TrainBatch& batch) {
  std::vector<Var> outs;
  for (std::size_t i = 0; i < batch.entries.size(); ++i) {
    outs.push_back(ndiff::mlp(t, t.constant(batch.entries[i].states), theta, pi, static_cast<int>(i), 0));
  }
  return t.stack_rows(outs);
}

}  // namespace

Var bc(Tape& t, Var predicted, Var expert) { return t.mean(t.square(t.sub(predicted, expert))); }

Var mse_align(Tape& t, Var text, Var traj) {
  const auto rows = t.value(text).rows();
  if (rows == 0) throw ShapeError("alignment of an empty batch");
  return t.scale(t.sum(t.square(t.sub(text, traj))), 1.0 / static_cast<double>(rows));
}

Var infonce(Tape& t, Var text, Var traj, double beta) {
  const auto b = t.value(text).rows();
  require_negatives(b);
  if (t.value(traj).rows() != b) throw ShapeError("infonce needs paired rows");
  const Var s = t.scale(t.cosine_similarity(text, traj), 1.0 / beta);
  const Var forward = t.softmax_cross_entropy(s, diagonal(b));
  const Var backward = t.softmax_cross_entropy(t.transpose(s), diagonal(b));
  return t.scale(t.add(forward, backward), 0.5);
}

Var text_text(Tape& t, Var text, Var positive, double beta) {
  const auto b = t.value(text).rows();
  require_negatives(b);
  if (t.value(positive).rows() != b) throw ShapeError("text-text loss needs paired rows");
  const Var s = t.scale(t.cosine_similarity(text, positive), 1.0 / beta);
  return t.softmax_cross_entropy(s, diagonal(b));
}

Graph build(Tape& t, const TenetModel& model, const TrainBatch& batch) {
  if (batch.entries.empty()) throw ConfigError("empty training batch");
  const ModelConfig& c = model.config();
  Graph g;
  for (const auto& b : model.blocks()) g.params.push_back(t.parameter(b.params));
  auto param = [&](std::string_view name) {
    const auto& blocks = model.blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].name == name) return g.params[i];
    }
    throw CapabilityError("model has no '" + std::string(name) + "' block");
  };
  const Var expert = t.constant(stack_mats(batch, &BatchEntry::actions));
  const Var zero = t.constant(Mat::Zero(1, 1));
  g.align = g.text_traj = g.text_text = zero;

  switch (c.kind) {
    case ModelKind::tenet: {
      const Var z = t.constant(stack_vectors(batch, &BatchEntry::text));
      const Var zt = ndiff::mlp(t, z, param("g"), g_manifest(c));
      const Var theta = ndiff::mlp(t, zt, param("h"), h_manifest(c));
      g.bc = bc(t, generated_actions(t, theta, model.policy_manifest(), batch), expert);
      g.total = g.bc;
      if (c.variant == Variant::direct) break;
      const Var zx = encode(t, param("traj"), c, batch);
      Var ground;
      if (c.variant == Variant::mse) {
        g.align = mse_align(t, zt, zx);
        ground = g.align;
      } else {
        g.text_traj = infonce(t, zt, zx, c.beta);
        Var positive = zt;
        if (c.paraphrase_positive) {
          positive = ndiff::mlp(t, t.constant(stack_vectors(batch, &BatchEntry::text_positive)), param("g"),
                                g_manifest(c));
        }
        g.text_text = text_text(t, zt, positive, c.beta);
        ground = t.add(g.text_traj, g.text_text);
      }
      g.total = t.add(g.bc, t.scale(ground, c.lambda_g));
      break;
    }
    case ModelKind::traj_hn: {
      const Var zx = encode(t, param("traj"), c, batch);
      const Var theta = ndiff::mlp(t, zx, param("h"), h_manifest(c));
      g.bc = bc(t, generated_actions(t, theta, model.policy_manifest(), batch), expert);
      g.total = g.bc;
      break;
    }
    case ModelKind::bc_shared: {
      const Var s = t.constant(stack_mats(batch, &BatchEntry::states));
      g.bc = bc(t, ndiff::mlp(t, s, param("policy"), model.policy_manifest()), expert);
      g.total = g.bc;
      break;
    }
    case ModelKind::prompt_concat: {
      const Var zx = encode(t, param("traj"), c, batch);
      std::vector<Var> rows;
      for (std::size_t i = 0; i < batch.entries.size(); ++i) {
        const auto& e = batch.entries[i];
        const Var zi = t.broadcast_rows(t.row(zx, static_cast<int>(i)), static_cast<int>(e.states.rows()));
        rows.push_back(t.concat_cols(t.constant(e.states), zi));
      }
      g.bc = bc(t, ndiff::mlp(t, t.stack_rows(rows), param("policy"), concat_policy_manifest(c)), expert);
      g.total = g.bc;
      break;
    }
  }
  return g;
}

LossBreakdown read(const Tape& t, const Graph& g) {
  return {t.scalar(g.total), t.scalar(g.bc), t.scalar(g.align), t.scalar(g.text_traj), t.scalar(g.text_text)};
}

}  // namespace losses

double bc_loss(const TenetModel& model, const Vec& z_tilde, std::span<const Transition> transitions) {
  if (transitions.empty()) throw InputError("bc loss needs at least one transition");
  const auto theta = model.generate_policy(z_tilde);
  const auto n = static_cast<Eigen::Index>(transitions.size());
  Mat s(n, theta.input_dim());
  Mat a(n, theta.output_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& tr = transitions[static_cast<std::size_t>(i)];
    if (static_cast<int>(tr.state.size()) != s.cols() || static_cast<int>(tr.action.size()) != a.cols()) {
      throw ShapeError("transition does not match the policy manifest");
    }
    for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = tr.state[static_cast<std::size_t>(j)];
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = tr.action[static_cast<std::size_t>(j)];
  }
  return (ndiff::mlp_forward_batch(theta, s) - a).array().square().mean();
}

double mse_align_loss(const Mat& text, const Mat& traj) {
  if (text.rows() != traj.rows() || text.cols() != traj.cols()) {
    throw ShapeError("alignment needs equally shaped embeddings");
  }
  Tape t;
  return t.scalar(losses::mse_align(t, t.constant(text), t.constant(traj)));
}

double infonce_text_traj(const GroundingBatch& batch, double beta) {
  Tape t;
  return t.scalar(losses::infonce(t, t.constant(batch.text), t.constant(batch.traj), beta));
}

double text_text_loss(const GroundingBatch& batch, double beta) {
  Tape t;
  const Var text = t.constant(batch.text);
  return t.scalar(losses::text_text(t, text, text, beta));
}

LossBreakdown total_loss(const TenetModel& model, const TrainBatch& batch) {
  Tape t;
  return losses::read(t, losses::build(t, model, batch));
}

std::vector<Vec> total_loss_gradient(const TenetModel& model, const TrainBatch& batch, LossBreakdown* breakdown) {
  Tape t;
  const auto g = losses::build(t, model, batch);
  t.backward(g.total);
  if (breakdown) *breakdown = losses::read(t, g);
  std::vector<Vec> out;
  for (Var p : g.params) out.push_back(t.grad(p).row(0).transpose());
  return out;
}

}  // namespace tenet
