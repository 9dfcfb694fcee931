#include "pulseforge/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "pulseforge/errors.hpp"
#include "pulseforge/parallel.hpp"
#include "pulseforge/states.hpp"

namespace pulseforge {

void TrainConfig::validate() const {
  if (dataset_size < 1) throw ConfigError("dataset_size must be >= 1");
  if (validation_size < 1) throw ConfigError("validation_size must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ConfigError("moment coefficients must lie in [0, 1)");
  if (epsilon <= 0.0) throw ConfigError("optimizer epsilon must be positive");
  if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (int h : hidden_sizes)
    if (h < 1) throw ConfigError("hidden sizes must be positive");
}

TrainSeeds TrainSeeds::from_master(std::uint64_t master) {
  return {mix_seed(master, 1), mix_seed(master, 2), mix_seed(master, 3),
          mix_seed(master, 4)};
}

void save_training_log(const TrainingLog& log, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open training log for writing: " + path);
  file << "epoch,train_cost,val_infidelity,elapsed_s\n";
  char buf[128];
  for (const auto& rec : log.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3f\n", rec.epoch,
                  rec.train_cost, rec.val_infidelity, rec.elapsed_s);
    file << buf;
  }
  if (!file) throw ConfigError("failed writing training log: " + path);
}

namespace {

// Adaptive-moment accumulators mirroring the model's parameter shapes.
struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long step = 0;

  explicit AdamState(const MlpModel& model) {
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      mw.emplace_back(Eigen::MatrixXd::Zero(model.weights[l].rows(),
                                            model.weights[l].cols()));
      vw.emplace_back(Eigen::MatrixXd::Zero(model.weights[l].rows(),
                                            model.weights[l].cols()));
      mb.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
      vb.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    }
  }
};

void adam_update(MlpModel& model, AdamState& adam, const GradientBundle& grads,
                 const TrainConfig& cfg) {
  adam.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    adam.mw[l] = cfg.beta1 * adam.mw[l] + (1.0 - cfg.beta1) * grads.weight_grads[l];
    adam.vw[l] = cfg.beta2 * adam.vw[l] +
                 (1.0 - cfg.beta2) * grads.weight_grads[l].cwiseAbs2();
    model.weights[l].array() -=
        cfg.learning_rate * (adam.mw[l].array() / bc1) /
        ((adam.vw[l].array() / bc2).sqrt() + cfg.epsilon);
    adam.mb[l] = cfg.beta1 * adam.mb[l] + (1.0 - cfg.beta1) * grads.bias_grads[l];
    adam.vb[l] = cfg.beta2 * adam.vb[l] +
                 (1.0 - cfg.beta2) * grads.bias_grads[l].cwiseAbs2();
    model.biases[l].array() -=
        cfg.learning_rate * (adam.mb[l].array() / bc1) /
        ((adam.vb[l].array() / bc2).sqrt() + cfg.epsilon);
  }
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const SystemConfig& sys,
                  const TrainSeeds& seeds,
                  const std::function<void(const EpochRecord&)>& progress) {
  cfg.validate();
  sys.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const int d = sys.n * sys.n - 1;
  const OperatorSet ops = build_operators(sys);
  TargetSet train_set =
      make_target_set(haar_dataset(cfg.dataset_size, sys.n, seeds.dataset), sys.n);
  TargetSet val_set = make_target_set(
      haar_dataset(cfg.validation_size, sys.n, seeds.validation), sys.n);
  std::vector<int> val_indices(cfg.validation_size);
  std::iota(val_indices.begin(), val_indices.end(), 0);

  MlpModel model =
      init_model(d, sys.num_pulses, seeds.init, cfg.hidden_sizes, cfg.activation);
  model.n = sys.n;
  model.n_comp = sys.n_comp;

  TrainResult result;
  result.model = model;
  result.log.best_epoch = 0;
  result.log.best_val_infidelity = std::numeric_limits<double>::infinity();
  if (cfg.max_epochs == 0) return result;

  AdamState adam(model);
  GradientBundle grads;
  std::vector<int> order(cfg.dataset_size);
  std::iota(order.begin(), order.end(), 0);
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(mix_seed(seeds.shuffle, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double cost_sum = 0.0;
    int batch_count = 0;
    for (int start = 0; start < cfg.dataset_size; start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, cfg.dataset_size);
      const std::vector<int> batch(order.begin() + start, order.begin() + stop);
      const BatchResult res =
          batch_cost_gradient(ops, sys, model, train_set, batch, grads, cfg.jobs);
      if (!std::isfinite(res.cost))
        throw NumericalError(
            "training cost became non-finite at epoch " + std::to_string(epoch) +
            ", batch " + std::to_string(batch_count) +
            " (weight norm " + std::to_string(model.weights[0].norm()) + ")");
      cost_sum += res.cost;
      ++batch_count;
      adam_update(model, adam, grads, cfg);
    }

    const BatchResult val =
        batch_cost(ops, sys, model, val_set, val_indices, cfg.jobs);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_cost = cost_sum / batch_count;
    rec.val_infidelity = 1.0 - val.mean_fidelity;
    rec.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.log.epochs.push_back(rec);
    if (progress) progress(rec);

    if (rec.val_infidelity < result.log.best_val_infidelity) {
      result.log.best_val_infidelity = rec.val_infidelity;
      result.log.best_epoch = epoch;
      result.model = model;
      epochs_since_best = 0;
    } else if (++epochs_since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

Evaluation evaluate_sequence(const OperatorSet& ops, const SystemConfig& sys,
                             const PulseSequence& seq, const PureState& target) {
  if (target.size() != sys.n)
    throw ConfigError("target dimension does not match system n");
  const SequenceEvolution ev = apply_sequence(ops, seq, vacuum_state(sys.n_comp));
  const DensityMatrix rho = partial_trace_qubit(ev.states.back(), sys.n_comp);
  const DensityMatrix projected = project_leading_levels(rho, sys.n);
  Evaluation out;
  out.fidelity = fidelity(projected, target);
  out.purity = purity(rho);
  out.leakage = 1.0 - projected.trace().real();
  return out;
}

PreparedState prepare_state(const MlpModel& model, const PureState& target,
                            const OperatorSet& ops, const SystemConfig& sys) {
  if (target.size() != sys.n)
    throw ConfigError("target dimension does not match system n");
  const auto basis = su_basis(sys.n);
  const Eigen::VectorXd features = featurize(target, basis);
  const Eigen::VectorXd raw = forward(model, features);
  PreparedState prepared;
  prepared.sequence = decode_outputs(raw, sys.num_pulses);
  const SequenceEvolution ev =
      apply_sequence(ops, prepared.sequence, vacuum_state(sys.n_comp));
  prepared.final_state = ev.states.back();
  const DensityMatrix rho = partial_trace_qubit(prepared.final_state, sys.n_comp);
  const DensityMatrix projected = project_leading_levels(rho, sys.n);
  prepared.metrics.fidelity = fidelity(projected, target);
  prepared.metrics.purity = purity(rho);
  prepared.metrics.leakage = 1.0 - projected.trace().real();
  return prepared;
}

std::vector<Evaluation> evaluate(const MlpModel& model,
                                 const std::vector<PureState>& targets,
                                 const SystemConfig& sys, int jobs) {
  model.validate();
  if (model.input_dim() != sys.n * sys.n - 1)
    throw ConfigError("model input width does not match system n");
  const OperatorSet ops = build_operators(sys);
  const TargetSet set = make_target_set(targets, sys.n);
  std::vector<Evaluation> out(targets.size());
  std::vector<std::string> errors(targets.size());
  parallel_for(static_cast<int>(targets.size()), jobs, [&](int i) {
    try {
      const Eigen::VectorXd raw = forward(model, set.features.col(i));
      const PulseSequence seq = decode_outputs(raw, sys.num_pulses);
      out[i] = evaluate_sequence(ops, sys, seq, set.states[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& err : errors)
    if (!err.empty()) throw NumericalError("evaluation failed: " + err);
  return out;
}

}  // namespace pulseforge
