#include "tenet/train/trainer.hpp"

#include <cstdio>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "tenet/error.hpp"
#include "tenet/ndiff/tape.hpp"

namespace tenet {

namespace {

// Every step allocates and frees tape buffers the size of the hypernetwork.
// Keeping them on the heap instead of fresh mappings avoids refaulting the
// pages each step.
void keep_large_buffers() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
    return true;
  }();
  (void)once;
#endif
}

}  // namespace

TrainResult train(const TrainRequest& request, const OfflineDataset& dataset, const TextEncoder& encoder) {
  request.train.validate();
  keep_large_buffers();
  const ModelConfig& mc = request.model;
  if (mc.d_z != encoder.dim()) {
    throw ConfigError("text encoder produces " + std::to_string(encoder.dim()) + " dims, model expects " +
                      std::to_string(mc.d_z));
  }
  if (dataset.tasks.empty() || dataset.state_dim() != mc.state_dim || dataset.action_dim() != mc.action_dim) {
    throw ConfigError("dataset dimensions do not match the model config");
  }
  if (mc.kind == ModelKind::tenet && mc.variant == Variant::contrastive &&
      effective_batch_tasks(request.train, request.train_ids.size()) < 2) {
    throw ConfigError("the contrastive variant needs at least 2 tasks per batch");
  }

  nlohmann::json meta = request.meta;
  meta["train"] = request.train.to_json();
  meta["train_tasks"] = request.train_ids;
  meta["dataset_hash"] = dataset.hash();
  meta["encoder"] = encoder.fingerprint();

  Checkpoint ckpt{TenetModel::initialize(mc, request.train.seed), meta, 0, std::nullopt};
  if (request.resume) {
    const Checkpoint& r = *request.resume;
    if (!(r.model.config() == mc)) throw ConfigError("resume checkpoint was trained with a different model config");
    if (!r.adam) throw ConfigError("resume checkpoint carries no optimizer state");
    if (r.meta.value("dataset_hash", "") != dataset.hash()) {
      throw ConfigError("resume checkpoint was trained on a different dataset");
    }
    if (r.step > request.train.steps) throw ConfigError("resume checkpoint is already past the requested steps");
    ckpt.model = r.model;
    ckpt.step = r.step;
    ckpt.adam = r.adam;
  } else {
    std::vector<ndiff::AdamState> states;
    for (const auto& b : ckpt.model.blocks()) states.push_back(ndiff::AdamState::zeros(b.params.size()));
    ckpt.adam = std::move(states);
  }

  const TextBank bank(dataset, request.train.levels, encoder);
  const BatchSampler sampler(dataset, request.train_ids, bank, request.train);
  std::vector<LossRecord> log;

  for (std::int64_t step = ckpt.step; step < request.train.steps; ++step) {
    const TrainBatch batch = sampler.sample(step);
    LossBreakdown loss;
    ndiff::Tape tape;
    losses::Graph graph;
    try {
      graph = losses::build(tape, ckpt.model, batch);
      tape.backward(graph.total);
      loss = losses::read(tape, graph);
      for (ndiff::Var p : graph.params) {
        if (!tape.grad(p).allFinite()) throw NumericError("non-finite gradient");
      }
    } catch (const NumericError& e) {
      throw TrainingAborted("training aborted at step " + std::to_string(step) + ": " + e.what(), ckpt, step);
    }
    if (step % request.train.log_every == 0) {
      log.push_back({step, loss});
      if (request.on_log) request.on_log(log.back());
    }
    auto& blocks = ckpt.model.blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const ndiff::Mat& g = tape.grad(graph.params[i]);
      ndiff::adam_step((*ckpt.adam)[i], blocks[i].params, Eigen::Map<const ndiff::Vec>(g.data(), g.size()),
                       request.train.lr, request.train.adam);
    }
    ckpt.step = step + 1;
  }
  return TrainResult{std::move(ckpt), std::move(log)};
}

std::string loss_log_csv(std::span<const LossRecord> log) {
  std::string out = "step,total,bc,align,text_traj,text_text\n";
  char buf[256];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(r.step),
                  r.loss.total, r.loss.bc, r.loss.align, r.loss.text_traj, r.loss.text_text);
    out += buf;
  }
  return out;
}

}  // namespace tenet
