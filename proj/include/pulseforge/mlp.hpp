#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/system.hpp"

namespace pulseforge {

// Hidden-layer nonlinearities. The output layer is always affine so the
// decoded amplitudes and phases can take either sign.
enum class Activation { kRectifier, kExponentialLinear, kSigmoidWeighted };

// Accepts canonical names ("rectifier", "exponential-linear",
// "sigmoid-weighted") and the usual short aliases (relu, elu, silu).
// Throws ConfigError on anything else.
Activation parse_activation(const std::string& name);
std::string activation_name(Activation activation);

double activation_value(Activation activation, double x);
double activation_derivative(Activation activation, double x);

// Shifted softplus mapping the last raw output to a positive duration.
// kTauMin keeps the sequence away from the degenerate T -> 0 point.
inline constexpr double kTauMin = 0.01;
double softplus(double x);

// Feed-forward controller: features in, raw pulse parameters out.
// weights[l] has shape layer_sizes[l+1] x layer_sizes[l].
// The trailing metadata ties a checkpoint to the system it was trained
// for; forward/decode never read it.
struct MlpModel {
  std::vector<int> layer_sizes;          // [d, hidden..., 4N+1]
  std::vector<Eigen::MatrixXd> weights;  // one per non-input layer
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::kRectifier;

  int n = 2;
  int n_comp = 6;
  int num_pulses = 7;
  std::uint64_t seed = 0;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }

  // Shape chaining and finiteness; throws ConfigError on violation.
  void validate() const;
};

// Per-layer pre- and post-activation vectors from one forward pass, kept
// for diagnostics and for the backward pass. For the affine output layer
// post equals pre.
struct ActivationTrace {
  std::vector<Eigen::VectorXd> pre;
  std::vector<Eigen::VectorXd> post;
};

// Fresh model with fan-balanced uniform weights (+-sqrt(6/(fan_in+fan_out)))
// and zero biases, deterministic per seed. d is the feature length n^2 - 1.
MlpModel init_model(int d, int num_pulses, std::uint64_t seed,
                    const std::vector<int>& hidden_sizes = {100, 300},
                    Activation activation = Activation::kRectifier);

// Affine-then-activation chain; the final layer stays affine. When trace
// is non-null its vectors are overwritten (reusable as a workspace).
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& features,
                        ActivationTrace* trace = nullptr);

// Raw output -> pulse sequence: per pulse k the block
// (zeta, xi, phi, varphi) = raw[4k..4k+3] taken as-is (signs meaningful),
// total time T = kTauMin + softplus(raw[4N]). Smooth everywhere.
PulseSequence decode_outputs(const Eigen::VectorXd& raw, int num_pulses);

// Checkpoint persistence. The file is a text document with fields
// {format_version, n, n_comp, num_pulses, layer_sizes, activation, seed,
// weights (row-major per layer), biases}; reals carry 17 significant
// digits so a round-trip is bit-exact. load throws ConfigError on
// malformed files, version mismatch, or inconsistent shapes.
void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

}  // namespace pulseforge
