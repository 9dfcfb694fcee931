#include "pulseforge/gradient.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "pulseforge/errors.hpp"
#include "pulseforge/parallel.hpp"

namespace pulseforge {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

double stable_sinc(double x) {
  // sin(x)/x; the series branch keeps full precision through x = 0.
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Divided-difference kernel of exp(+i lambda t):
// Phi_ab = i t e^{i (la + lb) t / 2} sinc((la - lb) t / 2), which equals
// (e^{i la t} - e^{i lb t})/(la - lb) off-diagonal and i t e^{i la t} on it.
Eigen::MatrixXcd phi_kernel(const Eigen::VectorXd& values, double t) {
  const int d = static_cast<int>(values.size());
  Eigen::MatrixXcd phi(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double mean = 0.5 * (values(a) + values(b)) * t;
      const double half_gap = 0.5 * (values(a) - values(b)) * t;
      phi(a, b) = kI * t * std::polar(stable_sinc(half_gap), mean);
    }
  return phi;
}

}  // namespace

Eigen::MatrixXcd expm_directional_derivative(const EigenSystem& es, double t,
                                             const Eigen::MatrixXcd& direction) {
  if (!direction.allFinite())
    throw NumericalError("derivative direction contains non-finite entries");
  const Eigen::MatrixXcd rotated =
      es.vectors.adjoint() * direction * es.vectors;
  const Eigen::MatrixXcd inner =
      rotated.cwiseProduct(phi_kernel(es.values, t));
  return es.vectors * inner * es.vectors.adjoint();
}

Eigen::MatrixXcd expm_directional_derivative(const Eigen::MatrixXcd& h, double t,
                                             const Eigen::MatrixXcd& direction) {
  return expm_directional_derivative(diagonalize(h), t, direction);
}

namespace {

// Projected overlaps c_beta = sum_{alpha < n} conj(target_alpha)
// psi(2 alpha + beta); the objective's fidelity is |c_0|^2 + |c_1|^2,
// i.e. <target| rho~ |target> without forming rho~.
void projected_overlaps(const PureState& joint, const PureState& target,
                        std::complex<double>& c0, std::complex<double>& c1) {
  c0 = 0.0;
  c1 = 0.0;
  for (int alpha = 0; alpha < target.size(); ++alpha) {
    const std::complex<double> tc = std::conj(target(alpha));
    c0 += tc * joint(2 * alpha);
    c1 += tc * joint(2 * alpha + 1);
  }
}

double amplitude_penalty(const SystemConfig& sys, const PulseSequence& seq) {
  double penalty = 0.0;
  for (const auto& p : seq.pulses) {
    const double s = p.zeta + p.xi;
    penalty += s * s;
  }
  return sys.lambda_reg * penalty;
}

}  // namespace

SequenceObjective sequence_objective(const OperatorSet& ops,
                                     const SystemConfig& sys,
                                     const PulseSequence& seq,
                                     const PureState& target) {
  if (target.size() != sys.n)
    throw ConfigError("target dimension does not match system n");
  const SequenceEvolution ev =
      apply_sequence(ops, seq, vacuum_state(sys.n_comp));
  std::complex<double> c0, c1;
  projected_overlaps(ev.states.back(), target, c0, c1);
  SequenceObjective result;
  result.fidelity = std::norm(c0) + std::norm(c1);
  result.objective = result.fidelity - amplitude_penalty(sys, seq);
  return result;
}

SequenceObjective sequence_objective_gradient(const OperatorSet& ops,
                                              const SystemConfig& sys,
                                              const PulseSequence& seq,
                                              const PureState& target) {
  if (target.size() != sys.n)
    throw ConfigError("target dimension does not match system n");
  const int num = static_cast<int>(seq.pulses.size());
  const int nc = sys.n_comp;
  const SequenceEvolution ev =
      apply_sequence(ops, seq, vacuum_state(nc));
  const double tau = ev.slice_time;

  std::complex<double> c0, c1;
  projected_overlaps(ev.states.back(), target, c0, c1);

  SequenceObjective result;
  result.fidelity = std::norm(c0) + std::norm(c1);
  result.objective = result.fidelity - amplitude_penalty(sys, seq);
  result.param_grad = Eigen::VectorXd::Zero(4 * num + 1);

  // Adjoint state chi with dF = 2 Re <chi | d psi_final>.
  PureState chi = PureState::Zero(2 * nc);
  for (int alpha = 0; alpha < sys.n; ++alpha) {
    chi(2 * alpha) = c0 * target(alpha);
    chi(2 * alpha + 1) = c1 * target(alpha);
  }

  double dF_dT = 0.0;
  for (int k = num - 1; k >= 0; --k) {
    const EigenSystem& es = ev.eigen[k];
    const Eigen::VectorXcd chi_t = es.vectors.adjoint() * chi;
    const Eigen::VectorXcd psi_t = es.vectors.adjoint() * ev.states[k];

    // Duration: dU_k/dT = (i H_k / N) U_k, so the contribution is
    // 2 Re[(i/N) <chi_k| H_k |psi_k>] with <chi|H|psi> read off in the
    // eigenbasis.
    std::complex<double> h_overlap = 0.0;
    for (int a = 0; a < 2 * nc; ++a)
      h_overlap += std::conj(chi_t(a)) * es.values(a) *
                   std::polar(1.0, es.values(a) * tau) * psi_t(a);
    dF_dT += 2.0 * (kI / static_cast<double>(num) * h_overlap).real();

    // <chi| dU |psi> for a Hamiltonian direction G reduces to
    // sum_ij G_ij K_ij with K = conj(V) E V^T and
    // E_ab = conj(chi~_a) Phi_ab psi~_b; the four drive directions are
    // sparse, so each sum touches O(dim) entries of K.
    const Eigen::MatrixXcd e_mat =
        (chi_t.conjugate() * psi_t.transpose())
            .cwiseProduct(phi_kernel(es.values, tau));
    const Eigen::MatrixXcd k_mat =
        es.vectors.conjugate() * e_mat * es.vectors.transpose();

    std::complex<double> s_p1 = 0.0, s_p2 = 0.0;
    for (int alpha = 0; alpha < nc; ++alpha) {
      const std::complex<double> up = k_mat(2 * alpha, 2 * alpha + 1);
      const std::complex<double> dn = k_mat(2 * alpha + 1, 2 * alpha);
      s_p1 += up + dn;
      s_p2 += kI * (up - dn);
    }
    std::complex<double> s_q1 = 0.0, s_q2 = 0.0;
    for (int alpha = 0; alpha + 1 < nc; ++alpha) {
      const double root = std::sqrt(alpha + 1.0);
      for (int beta = 0; beta < 2; ++beta) {
        const std::complex<double> up =
            k_mat(2 * alpha + beta, 2 * (alpha + 1) + beta);
        const std::complex<double> dn =
            k_mat(2 * (alpha + 1) + beta, 2 * alpha + beta);
        s_q1 += root * (up + dn);
        s_q2 += kI * root * (up - dn);
      }
    }

    const PulseParams& p = seq.pulses[k];
    const double cp = std::cos(p.phi), sp = std::sin(p.phi);
    const double cv = std::cos(p.varphi), sv = std::sin(p.varphi);
    const double reg = 2.0 * sys.lambda_reg * (p.zeta + p.xi);
    result.param_grad(4 * k) = 2.0 * (cp * s_p1 + sp * s_p2).real() - reg;
    result.param_grad(4 * k + 1) = 2.0 * (cv * s_q1 + sv * s_q2).real() - reg;
    result.param_grad(4 * k + 2) =
        2.0 * (p.zeta * (-sp * s_p1 + cp * s_p2)).real();
    result.param_grad(4 * k + 3) =
        2.0 * (p.xi * (-sv * s_q1 + cv * s_q2)).real();

    // chi_{k-1} = U_k^dag chi_k.
    Eigen::VectorXcd stepped = chi_t;
    for (int a = 0; a < 2 * nc; ++a)
      stepped(a) *= std::polar(1.0, -es.values(a) * tau);
    chi = es.vectors * stepped;
  }
  result.param_grad(4 * num) = dF_dT;
  return result;
}

void GradientBundle::set_zero(const MlpModel& model) {
  weight_grads.resize(model.weights.size());
  bias_grads.resize(model.biases.size());
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    weight_grads[l].setZero(model.weights[l].rows(), model.weights[l].cols());
    bias_grads[l].setZero(model.biases[l].size());
  }
  pulse_param_grads.setZero(model.output_dim());
}

namespace {

struct SampleSlot {
  double objective = 0.0;
  double fidelity = 0.0;
  Eigen::VectorXd raw;         // network output
  Eigen::VectorXd raw_grad;    // d(objective)/d(raw)
  Eigen::VectorXd param_grad;  // d(objective)/d(decoded params)
  ActivationTrace trace;
  std::string error;
};

// Forward (and optionally reverse) pass for one target; any exception is
// captured into the slot so parallel workers never unwind across threads.
void run_sample(const OperatorSet& ops, const SystemConfig& sys,
                const MlpModel& model, const TargetSet& set, int target_index,
                bool with_grad, SampleSlot& slot) {
  try {
    const Eigen::VectorXd features = set.features.col(target_index);
    slot.raw = forward(model, features, with_grad ? &slot.trace : nullptr);
    const PulseSequence seq = decode_outputs(slot.raw, sys.num_pulses);
    const PureState& target = set.states[target_index];
    if (with_grad) {
      SequenceObjective obj = sequence_objective_gradient(ops, sys, seq, target);
      slot.objective = obj.objective;
      slot.fidelity = obj.fidelity;
      slot.param_grad = std::move(obj.param_grad);
      // Through the decoder: parameters pass straight through, the
      // duration head is tau_min + softplus, whose slope is the sigmoid.
      slot.raw_grad = slot.param_grad;
      const int last = static_cast<int>(slot.raw.size()) - 1;
      const double x = slot.raw(last);
      const double sig = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                  : std::exp(x) / (1.0 + std::exp(x));
      slot.raw_grad(last) = slot.param_grad(last) * sig;
    } else {
      SequenceObjective obj = sequence_objective(ops, sys, seq, target);
      slot.objective = obj.objective;
      slot.fidelity = obj.fidelity;
    }
  } catch (const std::exception& e) {
    slot.error = e.what();
  }
}

void rethrow_first_error(const std::vector<SampleSlot>& slots) {
  for (const auto& slot : slots)
    if (!slot.error.empty())
      throw NumericalError("batch evaluation failed: " + slot.error);
}

// Accumulates scale * d(objective)/d(model parameters) for one sample via
// the standard layer-by-layer reverse sweep.
void backprop_sample(const MlpModel& model, const Eigen::VectorXd& features,
                     const SampleSlot& slot, double scale,
                     GradientBundle& out) {
  const int layers = model.num_layers();
  Eigen::VectorXd delta = scale * slot.raw_grad;
  for (int l = layers - 1; l >= 0; --l) {
    const Eigen::VectorXd& input = (l == 0) ? features : slot.trace.post[l - 1];
    out.weight_grads[l].noalias() += delta * input.transpose();
    out.bias_grads[l] += delta;
    if (l > 0) {
      Eigen::VectorXd back = model.weights[l].transpose() * delta;
      const Eigen::VectorXd& pre = slot.trace.pre[l - 1];
      for (int j = 0; j < back.size(); ++j)
        back(j) *= activation_derivative(model.activation, pre(j));
      delta = std::move(back);
    }
  }
}

}  // namespace

BatchResult batch_cost(const OperatorSet& ops, const SystemConfig& sys,
                       const MlpModel& model, const TargetSet& set,
                       const std::vector<int>& indices, int jobs) {
  if (indices.empty()) throw ConfigError("cost of an empty batch");
  std::vector<SampleSlot> slots(indices.size());
  parallel_for(static_cast<int>(indices.size()), jobs, [&](int s) {
    run_sample(ops, sys, model, set, indices[s], /*with_grad=*/false, slots[s]);
  });
  rethrow_first_error(slots);
  // Serial fold in sample order keeps the sum independent of jobs.
  double objective_sum = 0.0, fidelity_sum = 0.0;
  for (const auto& slot : slots) {
    objective_sum += slot.objective;
    fidelity_sum += slot.fidelity;
  }
  const double count = static_cast<double>(indices.size());
  return {1.0 - objective_sum / count, fidelity_sum / count};
}

BatchResult batch_cost_gradient(const OperatorSet& ops, const SystemConfig& sys,
                                const MlpModel& model, const TargetSet& set,
                                const std::vector<int>& indices,
                                GradientBundle& out, int jobs) {
  if (indices.empty()) throw ConfigError("gradient of an empty batch");
  std::vector<SampleSlot> slots(indices.size());
  parallel_for(static_cast<int>(indices.size()), jobs, [&](int s) {
    run_sample(ops, sys, model, set, indices[s], /*with_grad=*/true, slots[s]);
  });
  rethrow_first_error(slots);

  out.set_zero(model);
  const double count = static_cast<double>(indices.size());
  const double scale = -1.0 / count;  // cost = 1 - mean(objective)
  double objective_sum = 0.0, fidelity_sum = 0.0;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    objective_sum += slots[s].objective;
    fidelity_sum += slots[s].fidelity;
    out.pulse_param_grads += scale * slots[s].param_grad;
    backprop_sample(model, set.features.col(indices[s]), slots[s], scale, out);
  }
  return {1.0 - objective_sum / count, fidelity_sum / count};
}

double cost(const std::vector<PureState>& batch, const MlpModel& model,
            const OperatorSet& ops, const SystemConfig& sys) {
  TargetSet set = make_target_set(batch, sys.n);
  std::vector<int> indices(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) indices[s] = static_cast<int>(s);
  return batch_cost(ops, sys, model, set, indices).cost;
}

std::pair<double, GradientBundle> cost_gradient(const std::vector<PureState>& batch,
                                                const MlpModel& model,
                                                const OperatorSet& ops,
                                                const SystemConfig& sys) {
  TargetSet set = make_target_set(batch, sys.n);
  std::vector<int> indices(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) indices[s] = static_cast<int>(s);
  GradientBundle bundle;
  const BatchResult result =
      batch_cost_gradient(ops, sys, model, set, indices, bundle);
  return {result.cost, std::move(bundle)};
}

}  // namespace pulseforge
