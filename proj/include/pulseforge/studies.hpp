#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pulseforge/mlp.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/states.hpp"
#include "pulseforge/system.hpp"
#include "pulseforge/train.hpp"

namespace pulseforge {

// ------------------------------------------------------------- bootstrapping ---

// Percentile bootstrap interval for the mean of `samples`: `resamples`
// resampled means, sorted, read at the (1 -/+ coverage)/2 quantiles
// (linear interpolation). Deterministic per seed.
std::pair<double, double> bootstrap_percentile_interval(
    const std::vector<double>& samples, double coverage, int resamples,
    std::uint64_t seed);

// ------------------------------------------------------------- sweep reports ---

struct SweepPoint {
  double axis = 0.0;              // pulse count or training-set size
  double mean_infidelity = 0.0;   // across the point's models
  double lower = 0.0;             // interval bounds, lower <= mean <= upper
  double upper = 0.0;
  std::vector<double> model_means;  // per-model mean infidelity
};

struct SweepReport {
  std::string axis_name;
  std::vector<SweepPoint> points;
  std::vector<std::string> failures;  // points that failed, with reasons
};

// Common training budget and parallelism for the sweep-style studies.
struct StudyBudget {
  TrainConfig training;
  std::uint64_t master_seed = 1;
  int jobs = 1;
};

// Optional progress sink (studies run for minutes; lines go to stderr).
using StudyProgress = std::function<void(const std::string&)>;

// Trains seeds_per_point models per pulse count with distinct dataset
// seeds, evaluates each on a shared set of eval_states Haar targets, and
// attaches a bootstrap 75% interval (10,000 resamples) over the pooled
// per-state infidelities. A failed training is recorded and skipped.
SweepReport pulse_count_sweep(const SystemConfig& sys, int pulse_min,
                              int pulse_max, int seeds_per_point,
                              int eval_states, const StudyBudget& budget,
                              const StudyProgress& progress = {});

// Trains seeds_per_size models per training-set size; the interval is the
// min-max band over the per-model validation means (100 held-out states).
SweepReport training_size_study(const SystemConfig& sys,
                                const std::vector<int>& sizes,
                                int seeds_per_size, const StudyBudget& budget,
                                const StudyProgress& progress = {});

// ---------------------------------------------------------- truncation study ---

struct TruncationCurve {
  int n_comp = 0;                  // truncation the model was trained at
  std::vector<int> prepared;       // re-simulation truncations >= n_comp
  // 1 - Uhlmann fidelity between the leakage-projected (renormalized)
  // states prepared at n_comp and at prepared[k], mean over eval targets.
  std::vector<double> infidelity;
  bool flat = false;               // max - min within the flat tolerance
};

struct TruncationReport {
  std::vector<TruncationCurve> curves;
  int selected_n_comp = 0;  // smallest flat candidate, 0 if none
  double flat_tolerance = 1e-3;
};

// For each candidate truncation: train a model, then re-simulate its
// predicted sequences at every larger truncation and compare the prepared
// states (mean over eval_targets Haar states). Flags the smallest
// candidate whose curve is flat within flat_tolerance.
TruncationReport truncation_study(const SystemConfig& sys,
                                  const std::vector<int>& candidates,
                                  int max_prepared, int eval_targets,
                                  const StudyBudget& budget,
                                  const StudyProgress& progress = {});

// -------------------------------------------------------------- Bloch map ---

struct BlochMap {
  int resolution_theta = 0;
  int resolution_phi = 0;
  std::vector<double> thetas;  // size resolution_theta
  std::vector<double> phis;    // size resolution_phi
  // Row-major theta-major grids, index = ti * resolution_phi + pj.
  std::vector<double> log10_infidelity;  // infidelity clamped up to 1e-12
  std::vector<double> purity;
};

// Evaluates a qubit model over the area-uniform angle grid.
BlochMap bloch_map(const MlpModel& model, const SystemConfig& sys,
                   int resolution_theta, int resolution_phi, int jobs = 1);

// -------------------------------------------------------------- trajectory ---

struct TrajectorySample {
  double time = 0.0;
  PulseParams active_pulse;       // drive settings at this instant
  DensityMatrix reduced_state;    // oscillator state, qubit traced out
  double purity = 0.0;
  double fidelity = 0.0;          // against the trajectory's target
  double mean_excitation = 0.0;
};

struct Trajectory {
  PulseSequence sequence;
  std::vector<TrajectorySample> samples;  // t = 0 first, t = T last
};

// Evolves |0,0> through the model's predicted sequence for `target`,
// sampling each pulse at samples_per_pulse uniform sub-slice times. The
// final sample reproduces evaluate()'s metrics to 1e-10.
Trajectory record_trajectory(const MlpModel& model, const PureState& target,
                             const SystemConfig& sys, int samples_per_pulse);

// -------------------------------------------------------------- azimuthal ---

struct AzimuthalRow {
  double phi = 0.0;
  Eigen::VectorXd features;      // <X>, <Y>, <Z>
  double arctan_xy = 0.0;        // atan(<X>/<Y>), sign-limit at <Y> = 0
  Eigen::VectorXd raw;           // network outputs
  PulseSequence sequence;        // decoded
  ActivationTrace trace;         // per-layer pre/post activations
  double fidelity = 0.0;
};

// Sweeps phi at fixed theta along a Bloch-sphere parallel, recording the
// full network response for each sample point.
std::vector<AzimuthalRow> azimuthal_diagnostics(const MlpModel& model,
                                                const SystemConfig& sys,
                                                double theta, int phi_samples);

// ----------------------------------------------------------- photon number ---

struct PhotonBin {
  double lower = 0.0, upper = 0.0;  // excitation bin edges
  int count = 0;
  double mean_log10_infidelity = 0.0;
  double std_log10_infidelity = 0.0;
};

struct PhotonNumberReport {
  int n = 0;  // qudit dimension of the model
  std::vector<PhotonBin> bins;
};

// Bins log10 preparation infidelity of Haar targets by the target's mean
// excitation (20 equal-width bins over the observed range).
PhotonNumberReport photon_number_study(const MlpModel& model,
                                       const SystemConfig& sys, int samples,
                                       std::uint64_t seed, int jobs = 1);

// ------------------------------------------------------------- refinement ---

struct RefineConfig {
  double trigger = 0.997;  // below this, refinement kicks in
  double accept = 0.998;   // neighbor fidelity that counts as success
  int neighbors = 10;
  double epsilon = 0.004;  // maximum rotation angle
  std::uint64_t rotation_seed = 0;

  void validate() const;
};

struct RefineResult {
  PulseSequence sequence;
  double fidelity = 0.0;     // of `sequence` against the original target
  bool used_neighbor = false;
  bool accepted = true;      // fidelity cleared the accept threshold (or
                             // refinement never triggered)
};

// Post-processing: when the model's own prediction stays below the
// trigger, probe predictions for small random rotations exp(i a G) of the
// target (G traceless Hermitian, unit Frobenius norm; a uniform in
// [0, epsilon]), score every candidate sequence against the ORIGINAL
// target, and keep the best. Never returns a sequence worse than the
// unrefined one.
RefineResult refine(const MlpModel& model, const PureState& target,
                    const RefineConfig& cfg, const SystemConfig& sys);

// -------------------------------------------------------------- report files ---

// Comma-separated tables with a one-line header; writers shared by the
// command-line studies.
void write_sweep_report(const SweepReport& report, const std::string& path);
void write_truncation_report(const TruncationReport& report,
                             const std::string& path);
void write_bloch_map(const BlochMap& map, const std::string& path);
void write_bloch_grid(const BlochMap& map, const std::string& path);
void write_trajectory(const Trajectory& trajectory, int n_comp,
                      const std::string& path);
void write_azimuthal(const std::vector<AzimuthalRow>& rows,
                     const std::string& path);
void write_azimuthal_traces(const std::vector<AzimuthalRow>& rows,
                            const std::string& path);
void write_photon_report(const std::vector<PhotonNumberReport>& reports,
                         const std::string& path);

}  // namespace pulseforge
