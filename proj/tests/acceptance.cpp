// Acceptance gate: ten end-to-end checks covering the propagator oracle,
// gradient correctness, headline training targets, trend studies,
// refinement efficacy, algebraic identities, and bit-reproducibility.
// Prints one PASS/FAIL line per check on stdout; exit code is the number
// of failures. Trained models are cached on disk so reruns only
// re-evaluate.
//
//   acceptance [--only 3,7] [--cache DIR]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "pulseforge/cli.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/gradient.hpp"
#include "pulseforge/mlp.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/states.hpp"
#include "pulseforge/studies.hpp"
#include "pulseforge/system.hpp"
#include "pulseforge/train.hpp"

using namespace pulseforge;
namespace fs = std::filesystem;

namespace {

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ------------------------------------------------------------ model cache ---

fs::path g_cache_dir = "acceptance_cache";

struct TrainedMeta {
  double wall_s = 0.0;
  int epochs_ran = 0;
  int best_epoch = 0;
  double best_val_infidelity = 0.0;
};

struct Trained {
  MlpModel model;
  TrainedMeta meta;
};

Trained trained_model(const std::string& name, const TrainConfig& cfg,
                      const SystemConfig& sys, std::uint64_t master) {
  fs::create_directories(g_cache_dir);
  const fs::path ckpt_path = g_cache_dir / (name + ".json");
  const fs::path meta_path = g_cache_dir / (name + ".meta");
  if (fs::exists(ckpt_path) && fs::exists(meta_path)) {
    Trained cached{load_checkpoint(ckpt_path.string()), {}};
    std::ifstream meta(meta_path);
    meta >> cached.meta.wall_s >> cached.meta.epochs_ran >>
        cached.meta.best_epoch >> cached.meta.best_val_infidelity;
    if (meta && cached.model.n == sys.n && cached.model.n_comp == sys.n_comp &&
        cached.model.num_pulses == sys.num_pulses) {
      std::fprintf(stderr, "[cache] %s: best epoch %d, val infidelity %.3e\n",
                   name.c_str(), cached.meta.best_epoch,
                   cached.meta.best_val_infidelity);
      return cached;
    }
  }

  std::fprintf(stderr,
               "[train] %s: n=%d N=%d n_comp=%d dataset=%d max_epochs=%d\n",
               name.c_str(), sys.n, sys.num_pulses, sys.n_comp,
               cfg.dataset_size, cfg.max_epochs);
  const auto start = std::chrono::steady_clock::now();
  const TrainResult result =
      train(cfg, sys, TrainSeeds::from_master(master),
            [&](const EpochRecord& rec) {
              if (rec.epoch % 100 == 0)
                std::fprintf(stderr, "  %s epoch %d cost %.5f val %.3e\n",
                             name.c_str(), rec.epoch, rec.train_cost,
                             rec.val_infidelity);
            });
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  Trained out{result.model,
              {wall_s, static_cast<int>(result.log.epochs.size()),
               result.log.best_epoch, result.log.best_val_infidelity}};
  save_checkpoint(out.model, ckpt_path.string());
  std::ofstream meta(meta_path);
  meta.precision(17);
  meta << out.meta.wall_s << " " << out.meta.epochs_ran << " "
       << out.meta.best_epoch << " " << out.meta.best_val_infidelity << "\n";
  std::fprintf(stderr, "[train] %s done: %d epochs, %.1f min, val %.3e\n",
               name.c_str(), out.meta.epochs_ran, wall_s / 60.0,
               out.meta.best_val_infidelity);
  return out;
}

SystemConfig make_system(int n, int n_comp, int num_pulses) {
  SystemConfig sys;
  sys.n = n;
  sys.n_comp = n_comp;
  sys.num_pulses = num_pulses;
  sys.validate();
  return sys;
}

double mean_fidelity(const MlpModel& model, const std::vector<PureState>& targets,
                     const SystemConfig& sys) {
  const std::vector<Evaluation> evals = evaluate(model, targets, sys, 1);
  double sum = 0.0;
  for (const Evaluation& e : evals) sum += e.fidelity;
  return sum / static_cast<double>(evals.size());
}

std::vector<PureState> qubit_eval_set() {
  return haar_dataset(1000, 2, mix_seed(9001, 1));
}

// The three default-budget sweep models at a given pulse count; shared by
// the pulse-count and training-size checks.
Trained sweep_model(const std::string& tag, int n, int num_pulses,
                    int dataset_size, int seed_index) {
  TrainConfig cfg;
  cfg.dataset_size = dataset_size;
  cfg.max_epochs = 800;
  const SystemConfig sys = make_system(n, 6, num_pulses);
  return trained_model(tag + "_s" + std::to_string(seed_index), cfg, sys,
                       3000 + 100 * num_pulses + seed_index);
}

// --------------------------------------------------------------- criteria ---

Outcome check_propagator_oracle() {
  std::mt19937_64 rng(mix_seed(1111, 0));
  const std::complex<double> i_unit(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXcd h = oracles::random_hermitian(12, rng);
    const EigenSystem es = diagonalize(h);
    for (const double t : {0.1, 1.0, 5.0}) {
      const Eigen::MatrixXcd u = propagator(es, t);
      const Eigen::MatrixXcd series =
          oracles::matrix_exponential_series(i_unit * t * h);
      worst = std::max(worst, (u - series).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-9,
          format("max |U - series| = %.2e over 100 Hermitian 12x12, "
                 "t in {0.1, 1, 5} (bound 1e-9)",
                 worst)};
}

Outcome check_gradient_suite() {
  const int pulse_counts[] = {2, 3, 5};
  double worst = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const int n = instance < 10 ? 2 : 3;
    const int num_pulses = pulse_counts[instance % 3];
    const SystemConfig sys = make_system(n, n + 2, num_pulses);
    const OperatorSet ops = build_operators(sys);
    MlpModel model = init_model(n * n - 1, num_pulses,
                                mix_seed(2222, instance), {6, 8},
                                static_cast<Activation>(instance % 3));
    model.n = n;
    model.n_comp = sys.n_comp;
    if (instance == 3) {
      // Degenerate case: every drive amplitude decodes to exactly zero.
      model.weights.back().topRows(4 * num_pulses).setZero();
      model.biases.back().head(4 * num_pulses).setZero();
    }
    const std::vector<PureState> batch =
        haar_dataset(3, n, mix_seed(2223, instance));

    const auto [base_cost, grad] = cost_gradient(batch, model, ops, sys);
    (void)base_cost;

    // Flatten analytic and finite-difference gradients coordinate by
    // coordinate; relative error against a scale-aware denominator.
    std::vector<double> analytic, numeric;
    const auto probe = [&](double* coord, double analytic_value) {
      const double saved = *coord;
      const double h = 1e-6 * std::max(1.0, std::abs(saved));
      *coord = saved + h;
      const double up = cost(batch, model, ops, sys);
      *coord = saved - h;
      const double down = cost(batch, model, ops, sys);
      *coord = saved;
      analytic.push_back(analytic_value);
      numeric.push_back((up - down) / (2.0 * h));
    };
    for (int layer = 0; layer < model.num_layers(); ++layer) {
      Eigen::MatrixXd& w = model.weights[layer];
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
          probe(&w(r, c), grad.weight_grads[layer](r, c));
      Eigen::VectorXd& b = model.biases[layer];
      for (Eigen::Index r = 0; r < b.size(); ++r)
        probe(&b(r), grad.bias_grads[layer](r));
    }

    // The difference quotient carries ~1e-10 of roundoff (cost is O(1),
    // step 1e-6), so coordinates below 1e-4 are certified at the floor's
    // absolute precision of 1e-8 rather than at a meaningless ratio of
    // two noise-dominated numbers.
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      const double denom =
          std::max({std::abs(analytic[k]), std::abs(numeric[k]), 1e-4});
      worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / denom);
    }
  }
  return {worst < 1e-4,
          format("worst gradient rel. error = %.2e over 20 instances, "
                 "n in {2,3}, N in {2,3,5}, incl. all-drives-zero (bound 1e-4)",
                 worst)};
}

Outcome check_qubit_headline() {
  TrainConfig cfg;
  const SystemConfig sys = make_system(2, 6, 7);
  const Trained run = trained_model("qubit_n7_full", cfg, sys, 1001);
  const double mf = mean_fidelity(run.model, qubit_eval_set(), sys);
  const bool in_budget = run.meta.wall_s <= 7200.0;
  return {mf >= 0.995 && in_budget,
          format("mean fidelity %.5f on 1000 fresh Haar targets (bar 0.995); "
                 "n=2 N=7 trained %d epochs in %.0f min (budget 120)",
                 mf, run.meta.epochs_ran, run.meta.wall_s / 60.0)};
}

Outcome check_qutrit_headline() {
  TrainConfig cfg;
  const SystemConfig sys = make_system(3, 6, 9);
  const Trained run = trained_model("qutrit_n9_full", cfg, sys, 1002);
  const std::vector<PureState> targets = haar_dataset(1000, 3, mix_seed(9001, 2));
  const double mf = mean_fidelity(run.model, targets, sys);
  const bool in_budget = run.meta.wall_s <= 14400.0;
  return {mf >= 0.93 && in_budget,
          format("mean fidelity %.5f on 1000 fresh Haar targets (bar 0.93); "
                 "n=3 N=9 trained %d epochs in %.0f min (budget 240)",
                 mf, run.meta.epochs_ran, run.meta.wall_s / 60.0)};
}

Outcome check_pulse_count_trend() {
  const std::vector<PureState> targets = qubit_eval_set();
  double mean_high = 0.0, mean_low = 0.0;
  for (int s = 0; s < 3; ++s) {
    const Trained high = sweep_model("sweep_n7", 2, 7, 4096, s);
    const Trained low = sweep_model("sweep_n2", 2, 2, 4096, s);
    mean_high += 1.0 - mean_fidelity(high.model, targets,
                                     make_system(2, 6, 7));
    mean_low += 1.0 - mean_fidelity(low.model, targets,
                                    make_system(2, 6, 2));
  }
  mean_high /= 3.0;
  mean_low /= 3.0;
  const double ratio = mean_low / mean_high;
  return {ratio >= 5.0,
          format("mean infidelity N=2 %.3e vs N=7 %.3e, ratio %.1fx "
                 "(bar 5x), 3 seeds each",
                 mean_low, mean_high, ratio)};
}

Outcome check_benchmark_states() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<PureState> states(3, PureState(2));
  states[0] << inv_sqrt2, -inv_sqrt2;
  states[1] << inv_sqrt2, std::complex<double>(0.0, inv_sqrt2);
  states[2] << std::cos(std::acos(-1.0) / 8.0), std::sin(std::acos(-1.0) / 8.0);

  TrainConfig cfg;
  const auto judge = [&](const MlpModel& model, const SystemConfig& sys,
                         double* min_f, double* min_p, std::string* list) {
    const std::vector<Evaluation> evals = evaluate(model, states, sys, 1);
    *min_f = 1.0;
    *min_p = 1.0;
    for (const Evaluation& e : evals) {
      *min_f = std::min(*min_f, e.fidelity);
      *min_p = std::min(*min_p, e.purity);
    }
    *list = format("f %.5f/%.5f/%.5f p %.5f/%.5f/%.5f", evals[0].fidelity,
                   evals[1].fidelity, evals[2].fidelity, evals[0].purity,
                   evals[1].purity, evals[2].purity);
    return *min_f >= 0.99 && *min_p >= 0.995;
  };

  const SystemConfig sys5 = make_system(2, 6, 5);
  const Trained five = trained_model("qubit_n5_full", cfg, sys5, 1003);
  double min_f = 0.0, min_p = 0.0;
  std::string list;
  if (judge(five.model, sys5, &min_f, &min_p, &list))
    return {true, format("N=5 model: %s (bars 0.99 / 0.995)", list.c_str())};

  // The pulse-count latitude also admits the seven-pulse model.
  const SystemConfig sys7 = make_system(2, 6, 7);
  const Trained seven = trained_model("qubit_n7_full", cfg, sys7, 1001);
  double f7 = 0.0, p7 = 0.0;
  std::string list7;
  if (judge(seven.model, sys7, &f7, &p7, &list7))
    return {true, format("N=7 model: %s (bars 0.99 / 0.995); N=5 fell short "
                         "(%s)",
                         list7.c_str(), list.c_str())};
  return {false, format("neither model clears bars 0.99 / 0.995: N=5 %s; "
                        "N=7 %s",
                        list.c_str(), list7.c_str())};
}

Outcome check_refinement() {
  TrainConfig cfg;
  const SystemConfig sys = make_system(2, 6, 5);
  const Trained run = trained_model("qubit_n5_full", cfg, sys, 1003);

  const std::vector<BlochAngles> grid = bloch_grid(100, 100);
  std::vector<PureState> targets;
  targets.reserve(grid.size());
  for (const BlochAngles& angles : grid)
    targets.push_back(bloch_to_state(angles));
  const std::vector<Evaluation> before = evaluate(run.model, targets, sys, 1);

  const double bar = 0.998;
  int below_before = 0, below_after = 0, reduced = 0, passthrough_bad = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (before[k].fidelity < bar) {
      ++below_before;
      RefineConfig rc;
      rc.trigger = bar;  // attempt every state under the bar
      rc.accept = bar;
      // The trained network's low-fidelity pocket spans a few tenths of a
      // radian, so the neighbor search must reach past its rim: wider
      // rotations with a larger candidate pool than the defaults, still a
      // small perturbation of the target.
      rc.neighbors = 100;
      rc.epsilon = 0.2;
      rc.rotation_seed = mix_seed(8001, k);
      rc.validate();
      const RefineResult rr = refine(run.model, targets[k], rc, sys);
      if (rr.fidelity < before[k].fidelity - 1e-12) ++reduced;
      if (rr.fidelity < bar) ++below_after;
    } else if (k % 500 == 0) {
      // Above the trigger the refiner must return the model's own sequence.
      RefineConfig rc;
      rc.trigger = bar;
      rc.accept = bar;
      rc.rotation_seed = mix_seed(8001, k);
      rc.validate();
      const RefineResult rr = refine(run.model, targets[k], rc, sys);
      if (rr.used_neighbor ||
          std::abs(rr.fidelity - before[k].fidelity) > 1e-12)
        ++passthrough_bad;
    }
  }
  const bool pass =
      below_after * 5 <= below_before && reduced == 0 && passthrough_bad == 0;
  return {pass,
          format("below-%.3f count %d -> %d of %zu (bar <= %d); "
                 "100 neighbors, max rotation 0.2; "
                 "%d fidelity reductions, %d passthrough faults",
                 bar, below_before, below_after, targets.size(),
                 below_before / 5, reduced, passthrough_bad)};
}

Outcome check_training_size_trend() {
  const std::vector<PureState> targets = qubit_eval_set();
  double mean_large = 0.0, mean_small = 0.0;
  const SystemConfig sys = make_system(2, 6, 7);
  for (int s = 0; s < 3; ++s) {
    const Trained large = sweep_model("sweep_n7", 2, 7, 4096, s);
    const Trained small = sweep_model("size256_n7", 2, 7, 256, s);
    mean_large += 1.0 - mean_fidelity(large.model, targets, sys);
    mean_small += 1.0 - mean_fidelity(small.model, targets, sys);
  }
  mean_large /= 3.0;
  mean_small /= 3.0;
  return {mean_large <= mean_small,
          format("mean infidelity at 4096 targets %.3e <= at 256 targets "
                 "%.3e, 3 seeds each",
                 mean_large, mean_small)};
}

Outcome check_algebra() {
  // Basis properties for n up to 5, at exact tolerance.
  double worst_algebra = 0.0;
  for (int n = 2; n <= 5; ++n) {
    const std::vector<Eigen::MatrixXcd> basis = su_basis(n);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      worst_algebra = std::max(
          worst_algebra,
          (basis[a] - basis[a].adjoint()).cwiseAbs().maxCoeff());
      worst_algebra = std::max(worst_algebra, std::abs(basis[a].trace()));
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const std::complex<double> gram = (basis[a] * basis[b]).trace();
        const double expected = a == b ? 2.0 : 0.0;
        worst_algebra = std::max(worst_algebra, std::abs(gram - expected));
      }
    }
  }

  // <Z> of Haar qubit states is uniform on [-1, 1].
  const std::vector<Eigen::MatrixXcd> pauli = su_basis(2);
  std::vector<double> z_values;
  for (const PureState& psi : haar_dataset(2000, 2, mix_seed(9001, 3)))
    z_values.push_back(featurize(psi, pauli)(2));
  const double ks = ks_statistic_uniform(z_values, -1.0, 1.0);
  const double ks_critical = 1.628 / std::sqrt(2000.0);

  // Pure-state feature identity: sum of squared expectations.
  double worst_purity = 0.0;
  for (int n = 2; n <= 5; ++n) {
    const std::vector<Eigen::MatrixXcd> basis = su_basis(n);
    for (const PureState& psi : haar_dataset(50, n, mix_seed(9001, 10 + n))) {
      const double sum = featurize(psi, basis).squaredNorm();
      worst_purity =
          std::max(worst_purity, std::abs(sum - 2.0 * (1.0 - 1.0 / n)));
    }
  }

  const bool pass =
      worst_algebra < 1e-12 && ks < ks_critical && worst_purity < 1e-10;
  return {pass,
          format("basis residual %.1e (bound 1e-12); <Z> KS %.4f < %.4f "
                 "(1%% level); purity identity residual %.1e (bound 1e-10)",
                 worst_algebra, ks, ks_critical, worst_purity)};
}

// ---------------------------------------------------------- reproducibility ---

int run_cli_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("pulseforge");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Drops the trailing column (wall-clock seconds) from every CSV line.
std::string strip_last_column(const std::string& csv) {
  std::stringstream out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t comma = line.rfind(',');
    out << (comma == std::string::npos ? line : line.substr(0, comma)) << "\n";
  }
  return out.str();
}

Outcome check_reproducibility() {
  const fs::path root = fs::temp_directory_path() / "pulseforge_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path out = root / "out";
  const fs::path cfg_path = root / "tiny.ini";
  std::ofstream(cfg_path)
      << "[system]\nn = 2\nn_comp = 3\nnum_pulses = 2\n"
      << "[training]\ndataset_size = 16\nvalidation_size = 4\n"
      << "batch_size = 16\nmax_epochs = 3\npatience = 3\nhidden_sizes = 6\n"
      << "[study]\nphi_samples = 4\n"
      << "[seeds]\nmaster = 77\n"
      << "[io]\nout_dir = " << out.string() << "\n";

  const auto train_once = [&] {
    fs::remove_all(out);
    if (run_cli_args({"train", "--config", cfg_path.string()}) != 0)
      throw std::runtime_error("training run failed");
    return std::vector<std::string>{
        slurp(out / "checkpoint.json"),
        strip_last_column(slurp(out / "training_log.csv")),
        slurp(out / "config_resolved.ini"), slurp(out / "run_meta.json")};
  };
  const std::vector<std::string> first = train_once();
  const std::vector<std::string> second = train_once();
  const bool train_same = first == second;

  // Keep the trained checkpoint in place and rerun a report-writing study.
  std::ofstream(cfg_path, std::ios::app)
      << "checkpoint = " << (out / "checkpoint.json").string() << "\n";
  const fs::path study_out = root / "study";
  const auto study_once = [&] {
    fs::remove_all(study_out);
    if (run_cli_args({"study", "azimuthal", "--config", cfg_path.string(),
                      "--out", study_out.string()}) != 0)
      throw std::runtime_error("study run failed");
    return std::vector<std::string>{slurp(study_out / "azimuthal.csv"),
                                    slurp(study_out / "azimuthal_traces.csv"),
                                    slurp(study_out / "run_meta.json")};
  };
  const std::vector<std::string> study_first = study_once();
  const std::vector<std::string> study_second = study_once();
  const bool study_same = study_first == study_second;

  fs::remove_all(root);
  return {train_same && study_same,
          format("train artifacts %s, study reports %s across identical "
                 "reruns (wall-clock column excluded)",
                 train_same ? "bit-identical" : "DIFFER",
                 study_same ? "bit-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--only" && a + 1 < argc) {
      std::stringstream list(argv[++a]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::stoi(item));
    } else if (arg == "--cache" && a + 1 < argc) {
      g_cache_dir = argv[++a];
    } else {
      std::fprintf(stderr, "usage: acceptance [--only 1,2,...] [--cache DIR]\n");
      return 64;
    }
  }

  struct Entry {
    int id;
    const char* name;
    Outcome (*check)();
  };
  const Entry entries[] = {
      {1, "propagator oracle", check_propagator_oracle},
      {2, "gradient suite", check_gradient_suite},
      {3, "qubit fidelity", check_qubit_headline},
      {4, "qutrit fidelity", check_qutrit_headline},
      {5, "pulse-count trend", check_pulse_count_trend},
      {6, "benchmark states", check_benchmark_states},
      {7, "refinement efficacy", check_refinement},
      {8, "training-size trend", check_training_size_trend},
      {9, "algebraic identities", check_algebra},
      {10, "reproducibility", check_reproducibility},
  };

  int failures = 0;
  std::vector<std::string> lines;
  for (const Entry& entry : entries) {
    if (!only.empty() && !only.count(entry.id)) {
      lines.push_back(format("[%2d] SKIP %-20s (--only filter)", entry.id,
                             entry.name));
      continue;
    }
    Outcome outcome;
    try {
      outcome = entry.check();
    } catch (const std::exception& e) {
      outcome = {false, format("exception: %s", e.what())};
    }
    if (!outcome.pass) ++failures;
    lines.push_back(format("[%2d] %s %-20s %s", entry.id,
                           outcome.pass ? "PASS" : "FAIL", entry.name,
                           outcome.detail.c_str()));
  }
  for (const std::string& line : lines) std::printf("%s\n", line.c_str());
  std::fprintf(stderr, "acceptance: %d failure(s)\n", failures);
  return failures;
}
