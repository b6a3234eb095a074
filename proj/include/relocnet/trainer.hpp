#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relocnet/dataset.hpp"
#include "relocnet/evaluator.hpp"
#include "relocnet/model.hpp"
#include "relocnet/pipeline.hpp"

namespace relocnet {

struct HyperParams {
  std::size_t batch_size = 30;
  double learning_rate = 1e-6;
  double weight_decay = 5e-1;  // grid value; unusually large, one grid point
  double beta = 250.0;
  std::size_t epochs = 250;
  std::uint64_t seed = 0;
  double momentum = 0.9;
  double init_std = 0.01;  // <= 0 selects fan-in scaled init

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_position_error = 0.0;
  double val_angle_error = 0.0;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::string provenance;
  bool diverged = false;
  std::string diagnostic;

  std::string to_json() const;
};

/// Assembled inputs plus 7-vector targets.
struct TrainData {
  std::vector<NetInput> inputs;
  std::vector<PoseVector> targets;

  std::size_t size() const { return inputs.size(); }
};

TrainData make_train_data(const std::vector<const Trajectory*>& trajectories,
                          const ModalitySpec& modality, const Intrinsics& intr,
                          std::size_t side, const Normalizer& norm);

struct TrainResult {
  Model final_model;
  Model best_model;  // best validation position error (tie-break angle)
  TrainHistory history;
};

/// Mini-batch SGD with momentum and L2 weight decay. Per-epoch shuffling and
/// dropout are driven by hp.seed; identical inputs give identical histories.
/// On a non-finite loss the run stops with history.diverged set and the
/// previous epoch's snapshot in best/final.
/// An empty val set falls back to the training set for validation stats.
TrainResult train(const Model& init, const TrainData& train_set,
                  const TrainData& val_set, const HyperParams& hp);

/// One SGD step: v = momentum v - lr (g + wd p); p += v.
void sgd_update(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
                std::vector<Tensor>& velocity, double lr, double momentum,
                double wd);

struct SweepGrid {
  std::vector<std::size_t> batch_sizes{30};
  std::vector<double> weight_decays{5e-1};
  std::vector<double> betas{250.0};
  double lr_min = 1e-10, lr_max = 1e-6;  // log-uniform
  std::uint64_t seed = 0;
};

struct SweepEntry {
  HyperParams hp;
  double val_position_error = 0.0;
  double val_angle_error = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // ranked by val position error
};

/// Random search: samples `combos` settings from the grid (learning rate
/// log-uniform) and trains each with the shared seed policy.
SweepResult sweep(const ArchSpec& arch, const TrainData& train_set,
                  const TrainData& val_set, const SweepGrid& grid,
                  std::size_t combos, std::size_t epochs,
                  std::uint64_t model_seed);

struct StageResult {
  std::size_t stage = 0;  // 1-based trajectory count
  EvalReport report;
  std::size_t param_count = 0;
};

/// Trains one model per curriculum stage from the same initialization and
/// evaluates each on the fixed test trajectory.
std::vector<StageResult> run_curriculum(const ArchSpec& arch,
                                        const DatasetBundle& bundle,
                                        const Curriculum& curriculum,
                                        const HyperParams& hp,
                                        const ModalitySpec& modality,
                                        std::size_t side,
                                        double scene_scale = 1.0);

/// Same as train but initialized from a pretrained container (reshaped first
/// conv / head re-initialized per the container rules).
TrainResult finetune(const WeightContainer& container, const ArchSpec& arch,
                     const TrainData& train_set, const TrainData& val_set,
                     const HyperParams& hp);

}  // namespace relocnet
