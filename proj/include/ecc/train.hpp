#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ecc/data.hpp"
#include "ecc/models.hpp"

namespace ecc {

enum class TrainStage { kBase, kKdEdge, kAdapterFinetune, kRecallBoost };
std::string_view to_string(TrainStage stage);

struct TrainConfig {
  int epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  // Weight of the feature-distillation loss next to the edge cross-entropy.
  double kd_weight = 1.0;
  std::uint64_t seed = 0;
  TrainStage stage = TrainStage::kBase;

  // epochs >= 0, batch_size >= 1, learning_rate >= 0, kd_weight >= 0.
  void validate() const;
};

// Per-epoch summary over the whole training split. Epoch 0 is the state
// before the first update.
struct LossReport {
  int epoch = 0;
  double ce_loss = 0.0;
  double kd_loss = 0.0;
  double positive_ce_loss = 0.0;
  bool has_positives = false;
  double accuracy = 0.0;
  double recall = 0.0;
  // Mean min-norm weights over the epoch's steps (multi-objective stages only).
  std::vector<double> mean_alpha;
};

// One multi-objective update.
struct MooStep {
  std::vector<double> alpha;
  std::vector<double> inner_products;  // <combined, g_i>
  bool skipped = false;
};

struct TrainedModel {
  ModelSpec model;
  std::vector<LossReport> history;
};

struct KdOptions {
  // Record the edge as constants: only the adapter moves.
  bool freeze_edge = false;
  // Weight {CE, positive CE, KD} each step with the min-norm solution instead
  // of CE + kd_weight * KD.
  bool recall_boost = false;
};

struct TrainedEdgeKd {
  ModelSpec edge;
  AdapterSpec adapter;
  std::vector<LossReport> history;
  std::vector<MooStep> steps;
};

struct TunedAdapter {
  AdapterSpec adapter;
  // Copy of the cloud with layers after the adapter's cloud tap fine-tuned.
  ModelSpec cloud;
  std::vector<LossReport> history;
};

struct RecallBoosted {
  ModelSpec edge;
  std::vector<LossReport> history;
  std::vector<MooStep> steps;
};

// Minibatch SGD on the mean cross-entropy.
TrainedModel train_base(ModelSpec model, const Split& data, const TrainConfig& config);

// Edge training with feature distillation from a frozen cloud: the edge sees
// CE everywhere plus kd_weight * BCE(σ(cloud tap n), σ(adapter(edge tap m)))
// on layers up to m; the adapter sees only the distillation term.
TrainedEdgeKd train_edge_kd(ModelSpec edge, const ModelSpec& cloud, AdapterSpec adapter, const Split& data,
                            const TrainConfig& config, KdOptions options = {});

// Minimises CE of edge tap m -> adapter -> cloud layers > n. Only the adapter
// and the cloud tail move.
TunedAdapter finetune_adapter(const ModelSpec& edge, ModelSpec cloud, AdapterSpec adapter, const Split& data,
                              const TrainConfig& config);

// Two objectives, CE over all rows and CE over positive rows, combined each
// step with the min-norm weights.
RecallBoosted train_recall_boost(ModelSpec edge, const Split& data, const TrainConfig& config);

// CSV: epoch,ce,kd,positive_ce,accuracy,recall,alpha_ce,alpha_positive,alpha_kd
void write_training_log(std::ostream& os, const std::vector<LossReport>& history);

}  // namespace ecc
