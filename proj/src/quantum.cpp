#include "pulseforge/quantum.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "pulseforge/errors.hpp"

namespace pulseforge {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

void SystemConfig::validate() const {
  if (n < 2) throw ConfigError("qudit dimension n must be at least 2");
  if (n_comp < n)
    throw ConfigError("simulation truncation n_comp must be at least n");
  if (num_pulses < 1) throw ConfigError("num_pulses must be at least 1");
  if (g <= 0.0) throw ConfigError("coupling g must be positive");
  if (lambda_reg < 0.0)
    throw ConfigError("regularization weight must be non-negative");
}

OperatorSet build_operators(const SystemConfig& sys) {
  const int nc = sys.n_comp;
  const int d = sys.joint_dim();

  // Joint-space ladder and qubit operators in the index = 2*alpha + beta
  // ordering. Only a handful of diagonals are populated, but dense matrices
  // keep the downstream eigensolver path simple at these dimensions.
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);        // oscillator lowering
  Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(d, d);       // qubit sigma-
  Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(d, d);      // oscillator number
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(d, d);       // qubit sigma_z

  for (int alpha = 0; alpha < nc; ++alpha) {
    for (int beta = 0; beta < 2; ++beta) {
      const int row = 2 * alpha + beta;
      num(row, row) = static_cast<double>(alpha);
      sz(row, row) = (beta == 1) ? 1.0 : -1.0;
      if (alpha + 1 < nc) {
        // a |alpha+1, beta> = sqrt(alpha+1) |alpha, beta>
        a(row, 2 * (alpha + 1) + beta) = std::sqrt(alpha + 1.0);
      }
      if (beta == 1) {
        // sigma- |alpha, 1> = |alpha, 0>
        sm(2 * alpha, row) = 1.0;
      }
    }
  }

  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd sp = sm.adjoint();

  OperatorSet ops;
  ops.h0 = sys.g * (a * sp + ad * sm) + sys.delta_c * num +
           (sys.delta_eg / 2.0) * sz;
  ops.p1 = sm + sp;
  ops.p2 = kI * (sm - sp);
  ops.q1 = a + ad;
  ops.q2 = kI * (a - ad);
  return ops;
}

Eigen::MatrixXcd build_hamiltonian(const OperatorSet& ops, const PulseParams& p) {
  return ops.h0 + (p.zeta * std::cos(p.phi)) * ops.p1 +
         (p.zeta * std::sin(p.phi)) * ops.p2 +
         (p.xi * std::cos(p.varphi)) * ops.q1 +
         (p.xi * std::sin(p.varphi)) * ops.q2;
}

EigenSystem diagonalize(const Eigen::MatrixXcd& h) {
  if (!h.allFinite())
    throw NumericalError("Hamiltonian contains non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the Hamiltonian failed");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

Eigen::MatrixXcd propagator(const EigenSystem& es, double t) {
  const Eigen::VectorXcd phase =
      (kI * t * es.values.cast<std::complex<double>>().array()).exp();
  return es.vectors * phase.asDiagonal() * es.vectors.adjoint();
}

PureState propagate(const EigenSystem& es, double t, const PureState& psi) {
  const Eigen::VectorXcd phase =
      (kI * t * es.values.cast<std::complex<double>>().array()).exp();
  return es.vectors * (phase.asDiagonal() * (es.vectors.adjoint() * psi));
}

PureState vacuum_state(int n_comp) {
  PureState psi = PureState::Zero(2 * n_comp);
  psi(0) = 1.0;
  return psi;
}

SequenceEvolution apply_sequence(const OperatorSet& ops, const PulseSequence& seq,
                                 const PureState& initial) {
  SequenceEvolution ev;
  const int num = static_cast<int>(seq.pulses.size());
  ev.slice_time = seq.slice_time();
  ev.eigen.reserve(num);
  ev.states.reserve(num + 1);
  ev.states.push_back(initial);
  for (int k = 0; k < num; ++k) {
    ev.eigen.push_back(diagonalize(build_hamiltonian(ops, seq.pulses[k])));
    ev.states.push_back(propagate(ev.eigen.back(), ev.slice_time, ev.states.back()));
  }
  return ev;
}

DensityMatrix partial_trace_qubit(const PureState& joint, int n_comp) {
  DensityMatrix rho = DensityMatrix::Zero(n_comp, n_comp);
  for (int i = 0; i < n_comp; ++i)
    for (int j = 0; j < n_comp; ++j)
      rho(i, j) = joint(2 * i) * std::conj(joint(2 * j)) +
                  joint(2 * i + 1) * std::conj(joint(2 * j + 1));
  return rho;
}

DensityMatrix project_leading_levels(const DensityMatrix& rho, int n) {
  return rho.topLeftCorner(n, n);
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  const std::complex<double> val = target.dot(rho * target);  // <t| rho |t>
  const double f = val.real();
  if (!(f > -1e-9 && f < 1.0 + 1e-9))
    throw NumericalError("fidelity outside [0,1] beyond roundoff: " +
                         std::to_string(f));
  return std::min(1.0, std::max(0.0, f));
}

double purity(const DensityMatrix& rho) {
  return (rho * rho).trace().real();
}

double fidelity_mixed(const DensityMatrix& a, const DensityMatrix& b) {
  // F = (Tr sqrt(sqrt(a) b sqrt(a)))^2, computed via eigendecompositions.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sa(a);
  if (sa.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed in mixed-state fidelity");
  Eigen::VectorXd ea = sa.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd sqrt_a =
      sa.eigenvectors() * ea.asDiagonal() * sa.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sm(sqrt_a * b * sqrt_a);
  if (sm.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed in mixed-state fidelity");
  const double root_sum = sm.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return root_sum * root_sum;
}

double mean_excitation(const PureState& joint, int n_comp) {
  double total = 0.0;
  for (int alpha = 0; alpha < n_comp; ++alpha)
    total += alpha * (std::norm(joint(2 * alpha)) + std::norm(joint(2 * alpha + 1)));
  return total;
}

}  // namespace pulseforge
