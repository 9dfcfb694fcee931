#include "pulseforge/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "pulseforge/errors.hpp"
#include "pulseforge/parallel.hpp"

namespace pulseforge {

namespace {

constexpr double kLogFloor = 1e-12;  // infidelity clamp before log10

double log10_infidelity(double fidelity) {
  return std::log10(std::max(1.0 - fidelity, kLogFloor));
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_report(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open report for writing: " + path);
  return file;
}

void close_report(std::ofstream& file, const std::string& path) {
  file.flush();
  if (!file) throw ConfigError("failed writing report: " + path);
}

}  // namespace

std::pair<double, double> bootstrap_percentile_interval(
    const std::vector<double>& samples, double coverage, int resamples,
    std::uint64_t seed) {
  if (samples.empty())
    throw ConfigError("bootstrap interval of an empty sample");
  if (!(coverage > 0.0 && coverage < 1.0))
    throw ConfigError("bootstrap coverage must lie in (0, 1)");
  if (resamples < 1) throw ConfigError("bootstrap needs at least one resample");

  const std::size_t count = samples.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, count - 1);
  std::vector<double> means(resamples);
  for (int r = 0; r < resamples; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) sum += samples[pick(rng)];
    means[r] = sum / static_cast<double>(count);
  }
  std::sort(means.begin(), means.end());

  const auto quantile = [&](double q) {
    const double pos = q * (resamples - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= means.size()) return means.back();
    return means[lo] * (1.0 - frac) + means[lo + 1] * frac;
  };
  const double tail = (1.0 - coverage) / 2.0;
  return {quantile(tail), quantile(1.0 - tail)};
}

namespace {

constexpr int kBootstrapResamples = 10000;
constexpr double kBootstrapCoverage = 0.75;

// Stream tags for splitting a study's master seed. Training seeds come
// from a per-point chain so every model sees an independent dataset.
constexpr std::uint64_t kEvalStream = 900001;
constexpr std::uint64_t kBootstrapStream = 900002;

std::uint64_t point_master(std::uint64_t master, std::uint64_t axis,
                           int seed_index) {
  return mix_seed(mix_seed(master, axis), static_cast<std::uint64_t>(seed_index));
}

void report_progress(const StudyProgress& progress, const std::string& line) {
  if (progress) progress(line);
}

}  // namespace

SweepReport pulse_count_sweep(const SystemConfig& sys, int pulse_min,
                              int pulse_max, int seeds_per_point,
                              int eval_states, const StudyBudget& budget,
                              const StudyProgress& progress) {
  if (pulse_min < 1 || pulse_max < pulse_min)
    throw ConfigError("pulse range must satisfy 1 <= min <= max");
  if (seeds_per_point < 1 || eval_states < 1)
    throw ConfigError("seeds_per_point and eval_states must be >= 1");

  const std::vector<PureState> eval_targets =
      haar_dataset(eval_states, sys.n, mix_seed(budget.master_seed, kEvalStream));

  SweepReport report;
  report.axis_name = "num_pulses";
  for (int pulses = pulse_min; pulses <= pulse_max; ++pulses) {
    SystemConfig point_sys = sys;
    point_sys.num_pulses = pulses;
    SweepPoint point;
    point.axis = pulses;
    std::vector<double> pooled;  // per-state infidelities across models
    for (int s = 0; s < seeds_per_point; ++s) {
      report_progress(progress, "pulse_count: N=" + std::to_string(pulses) +
                                    " model " + std::to_string(s));
      try {
        const TrainSeeds seeds = TrainSeeds::from_master(
            point_master(budget.master_seed, static_cast<std::uint64_t>(pulses), s));
        TrainResult trained = train(budget.training, point_sys, seeds);
        const std::vector<Evaluation> evals =
            evaluate(trained.model, eval_targets, point_sys, budget.jobs);
        double sum = 0.0;
        for (const auto& e : evals) {
          pooled.push_back(1.0 - e.fidelity);
          sum += 1.0 - e.fidelity;
        }
        point.model_means.push_back(sum / static_cast<double>(evals.size()));
      } catch (const std::exception& e) {
        report.failures.push_back("num_pulses=" + std::to_string(pulses) +
                                  " model " + std::to_string(s) + ": " + e.what());
      }
    }
    if (point.model_means.empty()) continue;  // every model failed
    double mean = 0.0;
    for (double m : point.model_means) mean += m;
    point.mean_infidelity = mean / static_cast<double>(point.model_means.size());
    std::tie(point.lower, point.upper) = bootstrap_percentile_interval(
        pooled, kBootstrapCoverage, kBootstrapResamples,
        mix_seed(budget.master_seed, kBootstrapStream + pulses));
    report.points.push_back(std::move(point));
  }
  return report;
}

SweepReport training_size_study(const SystemConfig& sys,
                                const std::vector<int>& sizes,
                                int seeds_per_size, const StudyBudget& budget,
                                const StudyProgress& progress) {
  if (sizes.empty()) throw ConfigError("training_size study needs sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw ConfigError("training sizes must be ascending");
  if (seeds_per_size < 1) throw ConfigError("seeds_per_size must be >= 1");

  SweepReport report;
  report.axis_name = "training_size";
  for (int size : sizes) {
    SweepPoint point;
    point.axis = size;
    for (int s = 0; s < seeds_per_size; ++s) {
      report_progress(progress, "training_size: size=" + std::to_string(size) +
                                    " model " + std::to_string(s));
      try {
        TrainConfig cfg = budget.training;
        cfg.dataset_size = size;
        const TrainSeeds seeds = TrainSeeds::from_master(
            point_master(budget.master_seed, static_cast<std::uint64_t>(size), s));
        TrainResult trained = train(cfg, sys, seeds);
        // The held-out validation infidelity of the best checkpoint is the
        // model's score.
        point.model_means.push_back(trained.log.best_val_infidelity);
      } catch (const std::exception& e) {
        report.failures.push_back("training_size=" + std::to_string(size) +
                                  " model " + std::to_string(s) + ": " + e.what());
      }
    }
    if (point.model_means.empty()) continue;
    double mean = 0.0;
    for (double m : point.model_means) mean += m;
    point.mean_infidelity = mean / static_cast<double>(point.model_means.size());
    point.lower = *std::min_element(point.model_means.begin(),
                                    point.model_means.end());
    point.upper = *std::max_element(point.model_means.begin(),
                                    point.model_means.end());
    report.points.push_back(std::move(point));
  }
  return report;
}

namespace {

// Leakage-projected oscillator state, renormalized onto the first n
// levels, after running `seq` at truncation sys.n_comp.
DensityMatrix normalized_projected_state(const OperatorSet& ops,
                                         const SystemConfig& sys,
                                         const PulseSequence& seq, int n) {
  const SequenceEvolution ev = apply_sequence(ops, seq, vacuum_state(sys.n_comp));
  const DensityMatrix rho = partial_trace_qubit(ev.states.back(), sys.n_comp);
  DensityMatrix projected = project_leading_levels(rho, n);
  const double trace = projected.trace().real();
  if (trace <= 0.0)
    throw NumericalError("projected state has vanishing trace");
  return projected / trace;
}

}  // namespace

TruncationReport truncation_study(const SystemConfig& sys,
                                  const std::vector<int>& candidates,
                                  int max_prepared, int eval_targets,
                                  const StudyBudget& budget,
                                  const StudyProgress& progress) {
  if (candidates.empty()) throw ConfigError("truncation study needs candidates");
  for (int c : candidates)
    if (c < sys.n) throw ConfigError("truncation candidates must be >= n");
  if (max_prepared < *std::max_element(candidates.begin(), candidates.end()))
    throw ConfigError("max_prepared must cover every candidate");
  if (eval_targets < 1) throw ConfigError("eval_targets must be >= 1");

  const std::vector<PureState> targets =
      haar_dataset(eval_targets, sys.n, mix_seed(budget.master_seed, kEvalStream));

  TruncationReport report;
  for (int candidate : candidates) {
    report_progress(progress,
                    "truncation: n_comp=" + std::to_string(candidate));
    SystemConfig cand_sys = sys;
    cand_sys.n_comp = candidate;
    const TrainSeeds seeds = TrainSeeds::from_master(
        point_master(budget.master_seed, static_cast<std::uint64_t>(candidate), 0));
    TrainResult trained = train(budget.training, cand_sys, seeds);

    // Decode every target's sequence once; re-simulate per truncation.
    const OperatorSet cand_ops = build_operators(cand_sys);
    const TargetSet set = make_target_set(targets, sys.n);
    std::vector<PulseSequence> sequences(targets.size());
    std::vector<DensityMatrix> base_states(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Eigen::VectorXd raw = forward(trained.model, set.features.col(i));
      sequences[i] = decode_outputs(raw, cand_sys.num_pulses);
      base_states[i] =
          normalized_projected_state(cand_ops, cand_sys, sequences[i], sys.n);
    }

    TruncationCurve curve;
    curve.n_comp = candidate;
    for (int prepared = candidate; prepared <= max_prepared; ++prepared) {
      curve.prepared.push_back(prepared);
      if (prepared == candidate) {
        // Identical simulation by construction.
        curve.infidelity.push_back(0.0);
        continue;
      }
      SystemConfig prep_sys = cand_sys;
      prep_sys.n_comp = prepared;
      const OperatorSet prep_ops = build_operators(prep_sys);
      std::vector<double> infidelities(targets.size());
      std::vector<std::string> errors(targets.size());
      parallel_for(static_cast<int>(targets.size()), budget.jobs, [&](int i) {
        try {
          const DensityMatrix resim = normalized_projected_state(
              prep_ops, prep_sys, sequences[i], sys.n);
          infidelities[i] =
              std::max(0.0, 1.0 - fidelity_mixed(base_states[i], resim));
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      });
      for (const auto& err : errors)
        if (!err.empty())
          throw NumericalError("truncation re-simulation failed: " + err);
      double sum = 0.0;
      for (double v : infidelities) sum += v;
      curve.infidelity.push_back(sum / static_cast<double>(targets.size()));
    }
    const auto [lo, hi] =
        std::minmax_element(curve.infidelity.begin(), curve.infidelity.end());
    curve.flat = (*hi - *lo) <= report.flat_tolerance;
    report.curves.push_back(std::move(curve));
  }

  int selected = 0;
  for (const auto& curve : report.curves)
    if (curve.flat && (selected == 0 || curve.n_comp < selected))
      selected = curve.n_comp;
  report.selected_n_comp = selected;
  return report;
}

BlochMap bloch_map(const MlpModel& model, const SystemConfig& sys,
                   int resolution_theta, int resolution_phi, int jobs) {
  if (sys.n != 2 || model.n != 2)
    throw ConfigError("Bloch map requires a qubit model (n = 2)");
  const std::vector<BlochAngles> grid =
      bloch_grid(resolution_theta, resolution_phi);
  std::vector<PureState> states;
  states.reserve(grid.size());
  for (const auto& angles : grid) states.push_back(bloch_to_state(angles));
  const std::vector<Evaluation> evals = evaluate(model, states, sys, jobs);

  BlochMap map;
  map.resolution_theta = resolution_theta;
  map.resolution_phi = resolution_phi;
  for (int ti = 0; ti < resolution_theta; ++ti)
    map.thetas.push_back(grid[static_cast<std::size_t>(ti) * resolution_phi].theta);
  for (int pj = 0; pj < resolution_phi; ++pj) map.phis.push_back(grid[pj].phi);
  map.log10_infidelity.reserve(grid.size());
  map.purity.reserve(grid.size());
  for (const auto& e : evals) {
    map.log10_infidelity.push_back(log10_infidelity(e.fidelity));
    map.purity.push_back(e.purity);
  }
  return map;
}

Trajectory record_trajectory(const MlpModel& model, const PureState& target,
                             const SystemConfig& sys, int samples_per_pulse) {
  if (samples_per_pulse < 1)
    throw ConfigError("samples_per_pulse must be >= 1");
  if (target.size() != sys.n)
    throw ConfigError("target dimension does not match system n");
  const OperatorSet ops = build_operators(sys);
  const auto basis = su_basis(sys.n);
  const Eigen::VectorXd raw = forward(model, featurize(target, basis));

  Trajectory trajectory;
  trajectory.sequence = decode_outputs(raw, sys.num_pulses);
  const double tau = trajectory.sequence.slice_time();
  const int num = static_cast<int>(trajectory.sequence.pulses.size());

  const auto sample_at = [&](double time, const PureState& joint,
                             const PulseParams& pulse) {
    TrajectorySample s;
    s.time = time;
    s.active_pulse = pulse;
    s.reduced_state = partial_trace_qubit(joint, sys.n_comp);
    s.purity = purity(s.reduced_state);
    s.fidelity = fidelity(project_leading_levels(s.reduced_state, sys.n), target);
    s.mean_excitation = mean_excitation(joint, sys.n_comp);
    trajectory.samples.push_back(std::move(s));
  };

  PureState at_pulse_start = vacuum_state(sys.n_comp);
  sample_at(0.0, at_pulse_start, trajectory.sequence.pulses.front());
  for (int k = 0; k < num; ++k) {
    const PulseParams& pulse = trajectory.sequence.pulses[k];
    const EigenSystem es = diagonalize(build_hamiltonian(ops, pulse));
    PureState at_slice_end;
    for (int s = 1; s <= samples_per_pulse; ++s) {
      // The last sub-sample uses dt = tau exactly, so the trajectory's
      // final state matches the plain sequence evolution bit for bit.
      const double dt = (s == samples_per_pulse) ? tau : tau * s / samples_per_pulse;
      PureState joint = propagate(es, dt, at_pulse_start);
      sample_at(k * tau + dt, joint, pulse);
      if (s == samples_per_pulse) at_slice_end = std::move(joint);
    }
    at_pulse_start = std::move(at_slice_end);
  }
  return trajectory;
}

std::vector<AzimuthalRow> azimuthal_diagnostics(const MlpModel& model,
                                                const SystemConfig& sys,
                                                double theta, int phi_samples) {
  if (sys.n != 2 || model.n != 2)
    throw ConfigError("azimuthal diagnostics require a qubit model (n = 2)");
  if (phi_samples < 1) throw ConfigError("phi_samples must be >= 1");
  const OperatorSet ops = build_operators(sys);
  const auto basis = su_basis(2);

  std::vector<AzimuthalRow> rows;
  rows.reserve(phi_samples);
  for (int j = 0; j < phi_samples; ++j) {
    AzimuthalRow row;
    row.phi = 2.0 * std::numbers::pi * j / phi_samples;
    const PureState target = bloch_to_state({theta, row.phi});
    row.features = featurize(target, basis);
    const double x = row.features(0), y = row.features(1);
    if (y != 0.0) {
      row.arctan_xy = std::atan(x / y);
    } else {
      // Sign-limit convention at the <Y> = 0 crossing.
      row.arctan_xy = x > 0.0   ? std::numbers::pi / 2.0
                      : x < 0.0 ? -std::numbers::pi / 2.0
                                : 0.0;
    }
    row.raw = forward(model, row.features, &row.trace);
    row.sequence = decode_outputs(row.raw, sys.num_pulses);
    row.fidelity = evaluate_sequence(ops, sys, row.sequence, target).fidelity;
    rows.push_back(std::move(row));
  }
  return rows;
}

PhotonNumberReport photon_number_study(const MlpModel& model,
                                       const SystemConfig& sys, int samples,
                                       std::uint64_t seed, int jobs) {
  if (samples < 1) throw ConfigError("photon study needs samples >= 1");
  constexpr int kBins = 20;
  const std::vector<PureState> targets = haar_dataset(samples, sys.n, seed);
  const std::vector<Evaluation> evals = evaluate(model, targets, sys, jobs);

  std::vector<double> excitation(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double e = 0.0;
    for (int alpha = 0; alpha < sys.n; ++alpha)
      e += alpha * std::norm(targets[i](alpha));
    excitation[i] = e;
  }
  const double lo = *std::min_element(excitation.begin(), excitation.end());
  const double hi = *std::max_element(excitation.begin(), excitation.end());
  const double width = (hi - lo) > 1e-12 ? (hi - lo) / kBins : 1.0;

  PhotonNumberReport report;
  report.n = sys.n;
  report.bins.resize(kBins);
  std::vector<double> sum(kBins, 0.0), sum_sq(kBins, 0.0);
  for (int b = 0; b < kBins; ++b) {
    report.bins[b].lower = lo + b * width;
    report.bins[b].upper = lo + (b + 1) * width;
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const int b = std::min(kBins - 1,
                           static_cast<int>((excitation[i] - lo) / width));
    const double v = log10_infidelity(evals[i].fidelity);
    report.bins[b].count += 1;
    sum[b] += v;
    sum_sq[b] += v * v;
  }
  for (int b = 0; b < kBins; ++b) {
    if (report.bins[b].count == 0) continue;
    const double count = report.bins[b].count;
    const double mean = sum[b] / count;
    report.bins[b].mean_log10_infidelity = mean;
    report.bins[b].std_log10_infidelity =
        std::sqrt(std::max(0.0, sum_sq[b] / count - mean * mean));
  }
  return report;
}

void RefineConfig::validate() const {
  if (!(trigger > 0.0 && trigger <= accept && accept < 1.0))
    throw ConfigError("refine thresholds must satisfy 0 < trigger <= accept < 1");
  if (epsilon <= 0.0) throw ConfigError("refine rotation angle must be positive");
  if (neighbors < 1) throw ConfigError("refine needs at least one neighbor");
}

RefineResult refine(const MlpModel& model, const PureState& target,
                    const RefineConfig& cfg, const SystemConfig& sys) {
  cfg.validate();
  if (target.size() != sys.n)
    throw ConfigError("target dimension does not match system n");
  const OperatorSet ops = build_operators(sys);
  const auto basis = su_basis(sys.n);

  const Eigen::VectorXd raw = forward(model, featurize(target, basis));
  PulseSequence own_seq = decode_outputs(raw, sys.num_pulses);
  const double own_fidelity =
      evaluate_sequence(ops, sys, own_seq, target).fidelity;

  RefineResult result;
  result.sequence = std::move(own_seq);
  result.fidelity = own_fidelity;
  if (own_fidelity >= cfg.trigger) return result;  // passthrough

  std::mt19937_64 rng(cfg.rotation_seed);
  std::uniform_real_distribution<double> angle(0.0, cfg.epsilon);
  for (int j = 0; j < cfg.neighbors; ++j) {
    const Eigen::MatrixXcd generator = random_traceless_hermitian(sys.n, rng);
    const double alpha = angle(rng);
    // Neighbor target exp(i alpha G) |target>, a small unitary rotation.
    PureState neighbor =
        propagator(diagonalize(generator), alpha) * target;
    neighbor /= neighbor.norm();
    const Eigen::VectorXd neighbor_raw = forward(model, featurize(neighbor, basis));
    PulseSequence candidate = decode_outputs(neighbor_raw, sys.num_pulses);
    // Score against the ORIGINAL target: the neighbor only steers the
    // network toward a different sequence.
    const double cand_fidelity =
        evaluate_sequence(ops, sys, candidate, target).fidelity;
    if (cand_fidelity > result.fidelity) {
      result.sequence = std::move(candidate);
      result.fidelity = cand_fidelity;
      result.used_neighbor = true;
    }
  }
  result.accepted = result.fidelity >= cfg.accept;
  return result;
}

// ------------------------------------------------------------- report files ---

void write_sweep_report(const SweepReport& report, const std::string& path) {
  std::size_t max_models = 0;
  for (const auto& p : report.points)
    max_models = std::max(max_models, p.model_means.size());
  auto file = open_report(path);
  file << report.axis_name << ",mean_infidelity,ci_lower,ci_upper";
  for (std::size_t m = 0; m < max_models; ++m) file << ",model_" << m;
  file << "\n";
  for (const auto& p : report.points) {
    file << format_real(p.axis) << ',' << format_real(p.mean_infidelity) << ','
         << format_real(p.lower) << ',' << format_real(p.upper);
    for (std::size_t m = 0; m < max_models; ++m) {
      file << ',';
      if (m < p.model_means.size()) file << format_real(p.model_means[m]);
    }
    file << "\n";
  }
  close_report(file, path);
}

void write_truncation_report(const TruncationReport& report,
                             const std::string& path) {
  auto file = open_report(path);
  file << "n_comp,n_prepared,mean_infidelity\n";
  for (const auto& curve : report.curves)
    for (std::size_t k = 0; k < curve.prepared.size(); ++k)
      file << curve.n_comp << ',' << curve.prepared[k] << ','
           << format_real(curve.infidelity[k]) << "\n";
  close_report(file, path);
}

void write_bloch_map(const BlochMap& map, const std::string& path) {
  auto file = open_report(path);
  file << "theta,phi,log10_infidelity,purity\n";
  for (int ti = 0; ti < map.resolution_theta; ++ti)
    for (int pj = 0; pj < map.resolution_phi; ++pj) {
      const std::size_t idx =
          static_cast<std::size_t>(ti) * map.resolution_phi + pj;
      file << format_real(map.thetas[ti]) << ',' << format_real(map.phis[pj])
           << ',' << format_real(map.log10_infidelity[idx]) << ','
           << format_real(map.purity[idx]) << "\n";
    }
  close_report(file, path);
}

void write_bloch_grid(const BlochMap& map, const std::string& path) {
  auto file = open_report(path);
  file << "theta_index,phi_index,log10_infidelity\n";
  for (int ti = 0; ti < map.resolution_theta; ++ti)
    for (int pj = 0; pj < map.resolution_phi; ++pj) {
      const std::size_t idx =
          static_cast<std::size_t>(ti) * map.resolution_phi + pj;
      file << ti << ',' << pj << ',' << format_real(map.log10_infidelity[idx])
           << "\n";
    }
  close_report(file, path);
}

void write_trajectory(const Trajectory& trajectory, int n_comp,
                      const std::string& path) {
  auto file = open_report(path);
  file << "time,zeta,xi,phi,varphi,purity,fidelity,mean_excitation";
  for (int level = 0; level < n_comp; ++level) file << ",pop_" << level;
  file << "\n";
  for (const auto& s : trajectory.samples) {
    file << format_real(s.time) << ',' << format_real(s.active_pulse.zeta)
         << ',' << format_real(s.active_pulse.xi) << ','
         << format_real(s.active_pulse.phi) << ','
         << format_real(s.active_pulse.varphi) << ',' << format_real(s.purity)
         << ',' << format_real(s.fidelity) << ','
         << format_real(s.mean_excitation);
    for (int level = 0; level < n_comp; ++level)
      file << ',' << format_real(s.reduced_state(level, level).real());
    file << "\n";
  }
  close_report(file, path);
}

void write_azimuthal(const std::vector<AzimuthalRow>& rows,
                     const std::string& path) {
  auto file = open_report(path);
  const int num =
      rows.empty() ? 0 : static_cast<int>(rows.front().sequence.pulses.size());
  file << "phi,feat_x,feat_y,feat_z,arctan_xy,fidelity,total_time,raw_tail";
  for (int k = 0; k < num; ++k)
    file << ",zeta_" << k << ",xi_" << k << ",phase_qubit_" << k
         << ",phase_osc_" << k;
  file << "\n";
  for (const auto& row : rows) {
    file << format_real(row.phi) << ',' << format_real(row.features(0)) << ','
         << format_real(row.features(1)) << ',' << format_real(row.features(2))
         << ',' << format_real(row.arctan_xy) << ',' << format_real(row.fidelity)
         << ',' << format_real(row.sequence.total_time) << ','
         << format_real(row.raw(row.raw.size() - 1));
    for (const auto& pulse : row.sequence.pulses)
      file << ',' << format_real(pulse.zeta) << ',' << format_real(pulse.xi)
           << ',' << format_real(pulse.phi) << ',' << format_real(pulse.varphi);
    file << "\n";
  }
  close_report(file, path);
}

void write_azimuthal_traces(const std::vector<AzimuthalRow>& rows,
                            const std::string& path) {
  auto file = open_report(path);
  file << "phi,layer,unit,pre_activation,post_activation\n";
  for (const auto& row : rows)
    for (std::size_t l = 0; l < row.trace.pre.size(); ++l)
      for (int u = 0; u < row.trace.pre[l].size(); ++u)
        file << format_real(row.phi) << ',' << l << ',' << u << ','
             << format_real(row.trace.pre[l](u)) << ','
             << format_real(row.trace.post[l](u)) << "\n";
  close_report(file, path);
}

void write_photon_report(const std::vector<PhotonNumberReport>& reports,
                         const std::string& path) {
  auto file = open_report(path);
  file << "n,bin_lower,bin_upper,count,mean_log10_infidelity,"
          "std_log10_infidelity\n";
  for (const auto& report : reports)
    for (const auto& bin : report.bins)
      file << report.n << ',' << format_real(bin.lower) << ','
           << format_real(bin.upper) << ',' << bin.count << ','
           << format_real(bin.mean_log10_infidelity) << ','
           << format_real(bin.std_log10_infidelity) << "\n";
  close_report(file, path);
}

}  // namespace pulseforge
