#pragma once

#include <span>
#include <string>
#include <vector>

#include "tenet/envs/task.hpp"
#include "tenet/model/tenet_model.hpp"
#include "tenet/ndiff/tape.hpp"

namespace tenet {

// Paired text and trajectory embeddings, one row per distinct task. The batch
// itself is the candidate set for both contrastive directions.
struct GroundingBatch {
  std::vector<std::string> task_ids;
  ndiff::Mat text;  // B x d_e, projected descriptions
  ndiff::Mat traj;  // B x d_e, trajectory embeddings

  GroundingBatch(std::vector<std::string> ids, ndiff::Mat text, ndiff::Mat traj);
  int size() const { return static_cast<int>(task_ids.size()); }
};

// One task's share of a training step.
struct BatchEntry {
  std::string task_id;
  ndiff::Vec text;             // z_d of a sampled description
  ndiff::Vec text_positive;    // second description, used with paraphrase_positive
  ndiff::Mat trajectory;       // featurized trajectory (grounding target or prompt)
  ndiff::Mat states;           // n x state_dim
  ndiff::Mat actions;          // n x action_dim, expert labels
};

struct TrainBatch {
  std::vector<BatchEntry> entries;
};

struct LossBreakdown {
  double total = 0.0;
  double bc = 0.0;
  double align = 0.0;
  double text_traj = 0.0;
  double text_text = 0.0;
};

// Tape builders. All return 1 x 1 nodes.
namespace losses {

// Mean squared error over every action element of every entry.
ndiff::Var bc(ndiff::Tape& t, ndiff::Var predicted, ndiff::Var expert);
// Mean over rows of the squared L2 distance.
ndiff::Var mse_align(ndiff::Tape& t, ndiff::Var text, ndiff::Var traj);
// 0.5 * (CE(S, diag) + CE(S^T, diag)), S = cos(text, traj) / beta.
ndiff::Var infonce(ndiff::Tape& t, ndiff::Var text, ndiff::Var traj, double beta);
// CE(cos(text, positive) / beta, diag). With positive == text the positive
// logit is the constant 1 / beta.
ndiff::Var text_text(ndiff::Tape& t, ndiff::Var text, ndiff::Var positive, double beta);

// Node handles of one forward pass over a TrainBatch.
struct Graph {
  ndiff::Var total;
  ndiff::Var bc;
  ndiff::Var align;
  ndiff::Var text_traj;
  ndiff::Var text_text;
  std::vector<ndiff::Var> params;  // one per model block, in block order
};

// Records the kind- and variant-specific objective: bc + lambda_g * grounding
// for tenet (grounding = align for mse, text_traj + text_text for
// contrastive, none for direct); bc alone for the comparison learners.
Graph build(ndiff::Tape& t, const TenetModel& model, const TrainBatch& batch);

LossBreakdown read(const ndiff::Tape& t, const Graph& g);

}  // namespace losses

// Value-level entry points.
double bc_loss(const TenetModel& model, const ndiff::Vec& z_tilde, std::span<const Transition> transitions);
double mse_align_loss(const ndiff::Mat& text, const ndiff::Mat& traj);
double infonce_text_traj(const GroundingBatch& batch, double beta);
double text_text_loss(const GroundingBatch& batch, double beta);
LossBreakdown total_loss(const TenetModel& model, const TrainBatch& batch);

// Gradient of the total loss for every block, in block order.
std::vector<ndiff::Vec> total_loss_gradient(const TenetModel& model, const TrainBatch& batch,
                                            LossBreakdown* breakdown = nullptr);

}  // namespace tenet
