#pragma once

#include <vector>

namespace pulseforge {

// Physical and numerical constants of the driven oscillator-qubit system.
// Times are in units of 1/g with hbar = 1.
struct SystemConfig {
  int n = 2;            // qudit dimension (levels of the target state)
  int n_comp = 6;       // oscillator truncation used for simulation
  double g = 1.0;       // oscillator-qubit coupling
  double delta_c = 0.0; // oscillator detuning
  double delta_eg = 0.0;// qubit detuning
  double lambda_reg = 0.8; // amplitude regularization weight
  int num_pulses = 7;

  // Joint space dimension: n_comp oscillator levels times the qubit.
  int joint_dim() const { return 2 * n_comp; }

  // Throws ConfigError if n < 2, n_comp < n or num_pulses < 1.
  void validate() const;
};

// One rectangular pulse: drive amplitudes and phases for qubit and oscillator.
// Amplitudes may be negative; the sign is absorbable into the phase.
struct PulseParams {
  double zeta = 0.0;   // qubit drive amplitude
  double xi = 0.0;     // oscillator drive amplitude
  double phi = 0.0;    // qubit drive phase (radians)
  double varphi = 0.0; // oscillator drive phase (radians)
};

// An ordered sequence of pulses applied back to back, each lasting
// total_time / pulses.size().
struct PulseSequence {
  std::vector<PulseParams> pulses;
  double total_time = 0.0;

  double slice_time() const {
    return pulses.empty() ? 0.0 : total_time / static_cast<double>(pulses.size());
  }
};

}  // namespace pulseforge
