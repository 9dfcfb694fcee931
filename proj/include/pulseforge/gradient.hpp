#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/mlp.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/states.hpp"
#include "pulseforge/system.hpp"

namespace pulseforge {

// --------------------------------------------- matrix-exponential derivative ---

// Directional (Frechet) derivative of exp(+i H t) with respect to H in a
// Hermitian `direction`, from the eigenbasis divided-difference formula:
// with H = V diag(lambda) V^dag,
//   D = V [ (V^dag direction V) o Phi ] V^dag,
//   Phi_ab = (e^{i la t} - e^{i lb t}) / (la - lb),  Phi_aa = i t e^{i la t},
// evaluated through the equivalent uniformly stable product form
//   Phi_ab = i t e^{i (la + lb) t / 2} sinc((la - lb) t / 2)
// so near-degenerate pairs hit no cancellation and the degenerate limit is
// exact.
Eigen::MatrixXcd expm_directional_derivative(const EigenSystem& es, double t,
                                             const Eigen::MatrixXcd& direction);
Eigen::MatrixXcd expm_directional_derivative(const Eigen::MatrixXcd& h, double t,
                                             const Eigen::MatrixXcd& direction);

// --------------------------------------------------------- objective pieces ---

// Preparation quality of one decoded sequence against one target:
// evolve |0,0> through the sequence, trace out the qubit, keep the leading
// n x n block without renormalizing, and take <target| rho~ |target>.
// objective = fidelity - lambda_reg * sum_k (zeta_k + xi_k)^2; the batch
// cost is 1 - mean(objective).
struct SequenceObjective {
  double objective = 0.0;
  double fidelity = 0.0;
  // d(objective)/d(zeta_k, xi_k, phi_k, varphi_k) blocks of 4 per pulse,
  // then d(objective)/dT in the last slot. Filled only when requested.
  Eigen::VectorXd param_grad;
};

// Forward-only variant (no gradient).
SequenceObjective sequence_objective(const OperatorSet& ops,
                                     const SystemConfig& sys,
                                     const PulseSequence& seq,
                                     const PureState& target);

// Forward plus reverse sweep. The reverse pass runs the adjoint state
// backwards through the cached per-pulse eigensystems and contracts the
// divided-difference kernel against the sparse Hamiltonian directions, so
// its cost matches a second forward pass.
SequenceObjective sequence_objective_gradient(const OperatorSet& ops,
                                              const SystemConfig& sys,
                                              const PulseSequence& seq,
                                              const PureState& target);

// ------------------------------------------------------------ batch gradient ---

// d(cost)/d(parameters) in model shapes, plus the batch-mean intermediate
// gradients with respect to the decoded pulse parameters (4 per pulse,
// then T) for diagnostics.
struct GradientBundle {
  std::vector<Eigen::MatrixXd> weight_grads;
  std::vector<Eigen::VectorXd> bias_grads;
  Eigen::VectorXd pulse_param_grads;

  void set_zero(const MlpModel& model);
};

struct BatchResult {
  double cost = 0.0;
  double mean_fidelity = 0.0;
};

// Mean cost of the selected targets (indices into `set`).
BatchResult batch_cost(const OperatorSet& ops, const SystemConfig& sys,
                       const MlpModel& model, const TargetSet& set,
                       const std::vector<int>& indices, int jobs = 1);

// Cost plus full parameter gradient. Per-sample work (simulation and the
// adjoint sweep) runs in parallel; raw-output gradients are stored in
// per-sample slots and the network backward pass folds them serially in
// sample order, so results are bit-identical for any jobs value.
BatchResult batch_cost_gradient(const OperatorSet& ops, const SystemConfig& sys,
                                const MlpModel& model, const TargetSet& set,
                                const std::vector<int>& indices,
                                GradientBundle& out, int jobs = 1);

// Convenience wrappers over whole-state-list batches (featurized
// internally); the finite-difference test oracles and spot checks use
// these.
double cost(const std::vector<PureState>& batch, const MlpModel& model,
            const OperatorSet& ops, const SystemConfig& sys);
std::pair<double, GradientBundle> cost_gradient(const std::vector<PureState>& batch,
                                                const MlpModel& model,
                                                const OperatorSet& ops,
                                                const SystemConfig& sys);

}  // namespace pulseforge
