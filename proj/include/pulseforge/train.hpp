#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pulseforge/gradient.hpp"
#include "pulseforge/mlp.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/system.hpp"

namespace pulseforge {

// Knobs of the stochastic training loop. Defaults: adaptive-moment updates
// at step 1e-3 with moments 0.9/0.999, minibatches of 64 over 4096 Haar
// targets, up to 2000 epochs with patience 100 on validation infidelity.
struct TrainConfig {
  int dataset_size = 4096;
  int validation_size = 100;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 2000;
  int patience = 100;
  std::vector<int> hidden_sizes = {100, 300};
  Activation activation = Activation::kRectifier;
  int jobs = 1;

  void validate() const;
};

// Independent seeds for the four random streams of one run, split from a
// single master seed. Training and validation sets are disjoint by seed.
struct TrainSeeds {
  std::uint64_t dataset = 0;
  std::uint64_t validation = 0;
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;

  static TrainSeeds from_master(std::uint64_t master);
};

struct EpochRecord {
  int epoch = 0;               // 1-based
  double train_cost = 0.0;     // mean over the epoch's minibatch costs
  double val_infidelity = 0.0; // 1 - mean fidelity on the validation set
  double elapsed_s = 0.0;      // wall-clock since training started
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 0 means the initial model was never improved on
  double best_val_infidelity = 0.0;
};

// CSV with a one-line header: epoch,train_cost,val_infidelity,elapsed_s.
void save_training_log(const TrainingLog& log, const std::string& path);

struct TrainResult {
  MlpModel model;  // best-validation checkpoint, not the final epoch
  TrainingLog log;
};

// Full training run: sample datasets, initialize, iterate minibatch
// updates, early-stop on validation patience, return the best checkpoint.
// Bit-reproducible for fixed (cfg, sys, seeds) on one platform. A
// non-finite cost raises NumericalError naming the epoch and batch.
// max_epochs = 0 returns the initial model with an empty log.
TrainResult train(const TrainConfig& cfg, const SystemConfig& sys,
                  const TrainSeeds& seeds,
                  const std::function<void(const EpochRecord&)>& progress = {});

// ---------------------------------------------------------------- evaluation ---

struct Evaluation {
  double fidelity = 0.0;  // <target| rho~ |target>, leakage-projected
  double purity = 0.0;    // Tr rho^2 of the full reduced oscillator state
  double leakage = 0.0;   // 1 - Tr rho~
};

// Metrics of one already-decoded sequence against a target.
Evaluation evaluate_sequence(const OperatorSet& ops, const SystemConfig& sys,
                             const PulseSequence& seq, const PureState& target);

// Network prediction for one target plus the simulated outcome.
struct PreparedState {
  PulseSequence sequence;
  PureState final_state;  // joint oscillator-qubit state after the sequence
  Evaluation metrics;
};

PreparedState prepare_state(const MlpModel& model, const PureState& target,
                            const OperatorSet& ops, const SystemConfig& sys);

// Per-target metrics over a state list; embarrassingly parallel.
std::vector<Evaluation> evaluate(const MlpModel& model,
                                 const std::vector<PureState>& targets,
                                 const SystemConfig& sys, int jobs = 1);

}  // namespace pulseforge
