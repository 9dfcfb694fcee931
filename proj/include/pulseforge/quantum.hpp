#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/system.hpp"

namespace pulseforge {

using PureState = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

// Basis convention for the joint space: index = 2*alpha + beta where
// alpha < n_comp labels the oscillator level and beta in {0,1} the qubit.
// The qubit ground state is beta = 0 and sigma_z = diag(-1, +1) on (|0>,|1>).

// Operators on the joint space that the Hamiltonian is assembled from.
// H = H0 + zeta*cos(phi)*P1 + zeta*sin(phi)*P2 + xi*cos(varphi)*Q1
//       + xi*sin(varphi)*Q2, with
//   H0 = g (a sigma+ + a^dag sigma-) + delta_c n + delta_eg sigma_z / 2
//   P1 = sigma- + sigma+          P2 = i (sigma- - sigma+)
//   Q1 = a + a^dag                Q2 = i (a - a^dag)
struct OperatorSet {
  Eigen::MatrixXcd h0;
  Eigen::MatrixXcd p1, p2, q1, q2;
};

// Builds the static operators for the given system dimensions.
OperatorSet build_operators(const SystemConfig& sys);

// Dense Hamiltonian for a single pulse (Hermitian, joint_dim x joint_dim).
Eigen::MatrixXcd build_hamiltonian(const OperatorSet& ops, const PulseParams& p);

// Eigendecomposition of a Hermitian matrix: H = V diag(lambda) V^dag.
struct EigenSystem {
  Eigen::MatrixXcd vectors;  // V, unitary
  Eigen::VectorXd values;    // lambda, real
};

// Diagonalizes a Hermitian matrix. Throws NumericalError if the solver
// fails or the input contains non-finite entries.
EigenSystem diagonalize(const Eigen::MatrixXcd& h);

// Propagator exp(+i H t) evaluated from the eigendecomposition of H.
Eigen::MatrixXcd propagator(const EigenSystem& es, double t);

// Applies exp(+i H t) to a state without forming the full propagator.
PureState propagate(const EigenSystem& es, double t, const PureState& psi);

// Per-pulse data cached during a forward evolution so that gradients and
// trajectory probes can reuse the eigensystems.
struct SequenceEvolution {
  std::vector<EigenSystem> eigen;    // one per pulse
  std::vector<PureState> states;     // states[k] = state after pulse k; size N+1, states[0] = initial
  double slice_time = 0.0;
};

// Joint vacuum |oscillator |0>, qubit |0>> for the given truncation.
PureState vacuum_state(int n_comp);

// Evolves `initial` through the whole sequence, caching per-pulse
// eigensystems and intermediate states.
SequenceEvolution apply_sequence(const OperatorSet& ops, const PulseSequence& seq,
                                 const PureState& initial);

// Reduced oscillator density matrix: trace over the qubit.
// Result is n_comp x n_comp with unit trace for a normalized input.
DensityMatrix partial_trace_qubit(const PureState& joint, int n_comp);

// Leading n x n block of the reduced oscillator density matrix, NOT
// renormalized: its trace deficit is the leakage out of the first n levels.
DensityMatrix project_leading_levels(const DensityMatrix& rho, int n);

// Overlap fidelity <target| rho |target> for a pure target against a
// (possibly trace-deficient) density matrix. Clamped to [0, 1] against
// roundoff; a value outside [-1e-9, 1 + 1e-9] beforehand throws
// NumericalError.
double fidelity(const DensityMatrix& rho, const PureState& target);

// Tr(rho^2) of a normalized density matrix.
double purity(const DensityMatrix& rho);

// Uhlmann fidelity between two density matrices (used with normalized
// projections of different truncations padded to a common dimension).
double fidelity_mixed(const DensityMatrix& a, const DensityMatrix& b);

// Mean excitation number <n> of the oscillator for a joint pure state.
double mean_excitation(const PureState& joint, int n_comp);

}  // namespace pulseforge
