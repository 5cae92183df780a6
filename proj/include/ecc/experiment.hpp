#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecc/config.hpp"
#include "ecc/dataset.hpp"
#include "ecc/metrics.hpp"
#include "ecc/policy.hpp"
#include "ecc/train.hpp"

namespace ecc {

enum class RecallBoostMode { kOff, kSeparate, kCombined };
std::string_view to_string(RecallBoostMode mode);
RecallBoostMode parse_recall_boost_mode(std::string_view text);

struct AdapterConfig {
  std::size_t edge_tap = 0;
  std::size_t cloud_tap = 3;
  std::size_t blocks = 1;
  Activation block_activation = Activation::kRelu;
};

struct StageConfigs {
  TrainConfig cloud;
  TrainConfig edge;
  TrainConfig recall;
  TrainConfig finetune;
  // off: KD only; separate: KD then a recall-boost phase; combined: one
  // min-norm bundle over {CE, positive CE, KD} during the KD stage.
  RecallBoostMode recall_boost = RecallBoostMode::kOff;
};

struct SweepConfig {
  double c1 = 0.8;
  std::vector<double> c2;
};

struct ExperimentPlan {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  DatasetConfig dataset;
  ModelSpec edge;   // structure only; parameters are initialised from the seed
  ModelSpec cloud;
  AdapterConfig adapter;
  StageConfigs training;
  std::vector<EccPolicy> policies;
  SweepConfig sweep;
  std::size_t bytes_per_element = 4;
  ConfidenceMode confidence_mode = ConfidenceMode::kNormalClass;

  void validate() const;
};

// Desk-scale default: 7 classes (normal = 0), d = 16, n = 10000, 40% normal;
// edge 16-8-7, cloud 16-64-64-64-64-7; adapter edge tap 0 -> cloud tap 3.
ExperimentPlan standard_plan(std::uint64_t seed = 0);

ExperimentPlan plan_from_json(const config::Json& json);
config::Json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan load_plan(const std::filesystem::path& path);

// Independent stream seed derived from the master seed and a stream name.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

struct TrainedSystem {
  EccModels models;
  std::map<std::string, std::vector<LossReport>> logs;  // stage name -> history
};

// Stage 1 cloud base training, stage 2 edge KD (+ recall boosting), stage 3
// adapter fine-tuning. DivergenceError names the failing stage.
TrainedSystem train_system(const ExperimentPlan& plan, const Dataset& data);

void save_system(const std::filesystem::path& dir, const TrainedSystem& system);
EccModels load_models(const std::filesystem::path& dir);

struct Baselines {
  double flops_edge = 0.0;
  double flops_cloud = 0.0;
  ClassificationMetrics edge;
  ClassificationMetrics cloud;
  std::uint64_t input_bytes = 0;
};
Baselines measure_baselines(const EccModels& models, const Split& data, std::size_t bytes_per_element);

// Edge and cloud baseline rows followed by one row per policy in the plan.
std::vector<CostReport> evaluate_policies(const EccModels& models, const ExperimentPlan& plan, const Split& data);

struct SweepPoint {
  double c2 = 0.0;
  CostReport report;
  std::size_t edge_only = 0;
  std::size_t adaptive = 0;
  std::size_t full_cloud = 0;
  std::vector<RouteRecord> records;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<CostReport> frontier;  // s_p vs s_comp over the sweep points
};

// Evaluates Dynamic(c1, c2) for each c2 in an ascending grid within [0, c1].
SweepResult sweep_dynamic(const EccModels& models, double c1, std::span<const double> c2_grid, const Split& data,
                          ConfidenceMode mode, std::size_t bytes_per_element);

std::string sweep_label(double c2);

struct ExperimentResult {
  Dataset dataset;
  TrainedSystem system;
  std::vector<CostReport> reports;
  SweepResult sweep;
  std::vector<CostReport> frontier_comp;
  std::vector<CostReport> frontier_comm;
};

// Frontiers over reports and sweep points together.
std::vector<CostReport> combined_frontier(std::span<const CostReport> reports, const SweepResult& sweep,
                                          FrontierAxis axis);

// Generates data, trains every stage, evaluates the policy grid and the c2
// sweep on the validation split. When plan.output_dir is set, writes
// dataset.csv, checkpoints, train_*.csv, reports.csv, sweep.csv,
// frontier_comp.csv and frontier_comm.csv there.
ExperimentResult run_experiment(const ExperimentPlan& plan);

void write_csv_file(const std::filesystem::path& path, std::span<const CostReport> reports);
void write_training_logs(const std::filesystem::path& dir, const TrainedSystem& system);

}  // namespace ecc
