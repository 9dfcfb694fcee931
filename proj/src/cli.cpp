#include "pulseforge/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pulseforge/errors.hpp"
#include "pulseforge/mlp.hpp"
#include "pulseforge/run_config.hpp"
#include "pulseforge/states.hpp"
#include "pulseforge/studies.hpp"
#include "pulseforge/train.hpp"
#include "pulseforge/version.hpp"

namespace pulseforge {

namespace {

namespace fs = std::filesystem;

// Seed streams reserved for command-level randomness (training streams
// are split inside TrainSeeds; study streams inside the studies).
constexpr std::uint64_t kRefineStream = 42001;
constexpr std::uint64_t kPhotonStreamBase = 42100;  // + qudit dimension

struct CommonOptions {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int jobs = 1;
};

void add_common_options(CLI::App* sub, CommonOptions& opt, bool with_jobs) {
  sub->add_option("--config", opt.config_path, "configuration file");
  sub->add_option("--out", opt.out_override, "output directory override");
  sub->add_option("--seed", opt.seed_override, "master seed override")
      ->each([&opt](const std::string&) { opt.seed_given = true; });
  if (with_jobs)
    sub->add_option("--jobs", opt.jobs, "worker thread bound")
        ->check(CLI::PositiveNumber);
}

RunConfig load_config(const CommonOptions& opt) {
  RunConfig config =
      opt.config_path.empty() ? RunConfig{} : parse_config_file(opt.config_path);
  if (!opt.out_override.empty()) config.io.out_dir = opt.out_override;
  return config;
}

// Precedence: --seed flag, then the config file, then PULSEFORGE_SEED,
// then the built-in default.
std::uint64_t resolve_master_seed(const RunConfig& config,
                                  const CommonOptions& opt) {
  if (opt.seed_given) return opt.seed_override;
  if (config.was_set("seeds.master")) return config.seeds.master;
  if (const char* env = std::getenv("PULSEFORGE_SEED")) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      const unsigned long long parsed = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return parsed;
    } catch (const std::exception&) {
      throw ConfigError(
          "PULSEFORGE_SEED is not an unsigned integer: " + std::string(env));
    }
  }
  return config.seeds.master;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " +
                            ec.message());
}

std::string json_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Sidecar metadata: version, command, seeds, produced files, and any
// study-specific extras — everything needed to reproduce the run.
struct RunMeta {
  std::string command;
  std::string study;
  std::uint64_t master_seed = 0;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> extras;  // key, raw json
  std::vector<std::string> failures;
};

void write_run_meta(const RunMeta& meta, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write run metadata: " + path);
  file << "{\n";
  file << "  \"version\": \"" << kVersion << "\",\n";
  file << "  \"command\": \"" << json_escape(meta.command) << "\",\n";
  if (!meta.study.empty())
    file << "  \"study\": \"" << json_escape(meta.study) << "\",\n";
  file << "  \"master_seed\": " << meta.master_seed << ",\n";
  for (const auto& [key, value] : meta.extras)
    file << "  \"" << json_escape(key) << "\": " << value << ",\n";
  if (!meta.failures.empty()) {
    file << "  \"failures\": [";
    for (std::size_t k = 0; k < meta.failures.size(); ++k) {
      if (k) file << ", ";
      file << '"' << json_escape(meta.failures[k]) << '"';
    }
    file << "],\n";
  }
  file << "  \"outputs\": [";
  for (std::size_t k = 0; k < meta.outputs.size(); ++k) {
    if (k) file << ", ";
    file << '"' << json_escape(meta.outputs[k]) << '"';
  }
  file << "]\n}\n";
  if (!file) throw ConfigError("failed writing run metadata: " + path);
}

// System parameters for a loaded checkpoint: dimensions come from the
// checkpoint itself; couplings and the regularizer come from the config.
// Explicit config dimensions that contradict the checkpoint are an error.
SystemConfig system_for_model(const RunConfig& config, const MlpModel& model) {
  const auto check = [&](const char* key, int config_value, int model_value) {
    if (config.was_set(key) && config_value != model_value)
      throw ConfigError(std::string("checkpoint was trained with ") + key +
                        " = " + std::to_string(model_value) +
                        " but the config requests " +
                        std::to_string(config_value));
  };
  check("system.n", config.system.n, model.n);
  check("system.n_comp", config.system.n_comp, model.n_comp);
  check("system.num_pulses", config.system.num_pulses, model.num_pulses);
  SystemConfig sys = config.system;
  sys.n = model.n;
  sys.n_comp = model.n_comp;
  sys.num_pulses = model.num_pulses;
  sys.validate();
  return sys;
}

void print_sequence(std::ostream& out, const PulseSequence& seq) {
  out << "pulse        zeta              xi               phi            varphi\n";
  char buf[160];
  for (std::size_t k = 0; k < seq.pulses.size(); ++k) {
    const auto& p = seq.pulses[k];
    std::snprintf(buf, sizeof(buf), "%-5zu %+15.9f %+15.9f %+15.9f %+15.9f\n",
                  k + 1, p.zeta, p.xi, p.phi, p.varphi);
    out << buf;
  }
  char tbuf[64];
  std::snprintf(tbuf, sizeof(tbuf), "%.9f", seq.total_time);
  out << "total_time   " << tbuf << "\n";
}

void print_metrics(std::ostream& out, const Evaluation& metrics) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "fidelity %.6f   purity %.6f   leakage %.3e\n", metrics.fidelity,
                metrics.purity, metrics.leakage);
  out << buf;
}

RefineConfig refine_config_from(const RunConfig& config, std::uint64_t master) {
  RefineConfig rc;
  rc.trigger = config.study.refine_trigger;
  rc.accept = config.study.refine_accept;
  rc.neighbors = config.study.refine_neighbors;
  rc.epsilon = config.study.refine_epsilon;
  rc.rotation_seed = mix_seed(master, kRefineStream);
  return rc;
}

int cmd_train(const CommonOptions& opt) {
  RunConfig config = load_config(opt);
  const std::uint64_t master = resolve_master_seed(config, opt);
  config.seeds.master = master;
  config.training.jobs = opt.jobs;
  config.system.validate();
  config.training.validate();

  ensure_out_dir(config.io.out_dir);
  const fs::path out(config.io.out_dir);
  write_resolved_config(config, (out / "config_resolved.ini").string());

  const TrainSeeds seeds = TrainSeeds::from_master(master);
  std::cerr << "training: n=" << config.system.n
            << " pulses=" << config.system.num_pulses
            << " dataset=" << config.training.dataset_size
            << " seed=" << master << "\n";
  TrainResult result =
      train(config.training, config.system, seeds, [](const EpochRecord& rec) {
        if (rec.epoch == 1 || rec.epoch % 25 == 0)
          std::cerr << "epoch " << rec.epoch << "  cost " << rec.train_cost
                    << "  val_infidelity " << rec.val_infidelity << "\n";
      });

  save_checkpoint(result.model, (out / "checkpoint.json").string());
  save_training_log(result.log, (out / "training_log.csv").string());

  RunMeta meta;
  meta.command = "train";
  meta.master_seed = master;
  meta.outputs = {"checkpoint.json", "training_log.csv", "config_resolved.ini"};
  meta.extras.emplace_back("dataset_seed", std::to_string(seeds.dataset));
  meta.extras.emplace_back("validation_seed", std::to_string(seeds.validation));
  meta.extras.emplace_back("init_seed", std::to_string(seeds.init));
  meta.extras.emplace_back("shuffle_seed", std::to_string(seeds.shuffle));
  meta.extras.emplace_back("best_epoch", std::to_string(result.log.best_epoch));
  write_run_meta(meta, (out / "run_meta.json").string());

  std::cout << "best epoch " << result.log.best_epoch << ", validation infidelity "
            << result.log.best_val_infidelity << "\n"
            << "checkpoint: " << (out / "checkpoint.json").string() << "\n";
  return 0;
}

int cmd_prepare(const CommonOptions& opt, const std::string& checkpoint,
                const std::string& target_spec, bool do_refine) {
  RunConfig config = load_config(opt);
  const std::uint64_t master = resolve_master_seed(config, opt);
  const MlpModel model = load_checkpoint(checkpoint);
  const SystemConfig sys = system_for_model(config, model);

  bool normalized = false;
  const PureState target = parse_target(target_spec, sys.n, &normalized);
  if (normalized)
    std::cerr << "note: target amplitudes were not normalized; using the "
                 "normalized state\n";

  const OperatorSet ops = build_operators(sys);
  const PreparedState prepared = prepare_state(model, target, ops, sys);
  print_sequence(std::cout, prepared.sequence);
  print_metrics(std::cout, prepared.metrics);

  if (do_refine) {
    const RefineResult refined =
        refine(model, target, refine_config_from(config, master), sys);
    if (refined.used_neighbor) {
      std::cout << "\nrefined (neighbor prediction, "
                << (refined.accepted ? "accepted" : "below accept threshold")
                << "):\n";
      print_sequence(std::cout, refined.sequence);
      const Evaluation metrics =
          evaluate_sequence(ops, sys, refined.sequence, target);
      print_metrics(std::cout, metrics);
    } else {
      std::cout << "\nrefinement: model's own sequence kept\n";
    }
  }
  return 0;
}

int cmd_refine(const CommonOptions& opt, const std::string& checkpoint,
               const std::string& target_spec) {
  RunConfig config = load_config(opt);
  const std::uint64_t master = resolve_master_seed(config, opt);
  const MlpModel model = load_checkpoint(checkpoint);
  const SystemConfig sys = system_for_model(config, model);

  bool normalized = false;
  const PureState target = parse_target(target_spec, sys.n, &normalized);
  if (normalized)
    std::cerr << "note: target amplitudes were not normalized; using the "
                 "normalized state\n";

  const OperatorSet ops = build_operators(sys);
  const PreparedState unrefined = prepare_state(model, target, ops, sys);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "unrefined fidelity %.6f\n",
                unrefined.metrics.fidelity);
  std::cout << buf;

  const RefineResult refined =
      refine(model, target, refine_config_from(config, master), sys);
  std::snprintf(buf, sizeof(buf), "refined fidelity   %.6f\n", refined.fidelity);
  std::cout << buf;
  std::cout << "used_neighbor " << (refined.used_neighbor ? "yes" : "no")
            << ", accepted " << (refined.accepted ? "yes" : "no") << "\n\n";
  print_sequence(std::cout, refined.sequence);
  return 0;
}

int cmd_study(const CommonOptions& opt, const std::string& name) {
  RunConfig config = load_config(opt);
  const std::uint64_t master = resolve_master_seed(config, opt);
  config.seeds.master = master;
  config.training.jobs = opt.jobs;
  config.system.validate();

  ensure_out_dir(config.io.out_dir);
  const fs::path out(config.io.out_dir);
  write_resolved_config(config, (out / "config_resolved.ini").string());

  const auto progress = [](const std::string& line) {
    std::cerr << line << "\n";
  };
  const StudyBudget budget{config.training, master, opt.jobs};

  RunMeta meta;
  meta.command = "study";
  meta.study = name;
  meta.master_seed = master;
  meta.outputs.push_back("config_resolved.ini");

  const auto load_model_for = [&](const std::string& path) {
    if (path.empty())
      throw ConfigError("study '" + name + "' needs a checkpoint (io.checkpoint)");
    return load_checkpoint(path);
  };

  if (name == "pulse_count") {
    const SweepReport report = pulse_count_sweep(
        config.system, config.study.pulse_min, config.study.pulse_max,
        config.study.seeds_per_point, config.study.eval_states, budget,
        progress);
    write_sweep_report(report, (out / "pulse_count.csv").string());
    meta.outputs.push_back("pulse_count.csv");
    meta.failures = report.failures;
  } else if (name == "training_size") {
    const SweepReport report =
        training_size_study(config.system, config.study.sizes,
                            config.study.seeds_per_size, budget, progress);
    write_sweep_report(report, (out / "training_size.csv").string());
    meta.outputs.push_back("training_size.csv");
    meta.failures = report.failures;
  } else if (name == "truncation") {
    const TruncationReport report = truncation_study(
        config.system, config.study.n_comp_candidates,
        config.study.n_prepared_max, config.study.truncation_targets, budget,
        progress);
    write_truncation_report(report, (out / "truncation.csv").string());
    meta.outputs.push_back("truncation.csv");
    meta.extras.emplace_back("selected_n_comp",
                             std::to_string(report.selected_n_comp));
  } else if (name == "bloch_map") {
    const MlpModel model = load_model_for(config.io.checkpoint);
    const SystemConfig sys = system_for_model(config, model);
    const BlochMap map =
        bloch_map(model, sys, config.study.resolution_theta,
                  config.study.resolution_phi, opt.jobs);
    write_bloch_map(map, (out / "bloch_map.csv").string());
    write_bloch_grid(map, (out / "bloch_map_grid.csv").string());
    meta.outputs.push_back("bloch_map.csv");
    meta.outputs.push_back("bloch_map_grid.csv");
  } else if (name == "trajectory") {
    const MlpModel model = load_model_for(config.io.checkpoint);
    const SystemConfig sys = system_for_model(config, model);
    bool normalized = false;
    const PureState target = parse_target(config.study.target, sys.n, &normalized);
    if (normalized)
      std::cerr << "note: trajectory target normalized before use\n";
    const Trajectory trajectory = record_trajectory(
        model, target, sys, config.study.samples_per_pulse);
    write_trajectory(trajectory, sys.n_comp, (out / "trajectory.csv").string());
    meta.outputs.push_back("trajectory.csv");
  } else if (name == "azimuthal") {
    const MlpModel model = load_model_for(config.io.checkpoint);
    const SystemConfig sys = system_for_model(config, model);
    const std::vector<AzimuthalRow> rows = azimuthal_diagnostics(
        model, sys, config.study.theta_over_pi * std::acos(-1.0),
        config.study.phi_samples);
    write_azimuthal(rows, (out / "azimuthal.csv").string());
    write_azimuthal_traces(rows, (out / "azimuthal_traces.csv").string());
    meta.outputs.push_back("azimuthal.csv");
    meta.outputs.push_back("azimuthal_traces.csv");
  } else if (name == "photon_number") {
    if (config.study.checkpoint_n2.empty() && config.study.checkpoint_n3.empty())
      throw ConfigError(
          "study 'photon_number' needs study.checkpoint_n2 and/or "
          "study.checkpoint_n3");
    std::vector<PhotonNumberReport> reports;
    for (const std::string& path :
         {config.study.checkpoint_n2, config.study.checkpoint_n3}) {
      if (path.empty()) continue;
      const MlpModel model = load_checkpoint(path);
      const SystemConfig sys = system_for_model(config, model);
      reports.push_back(photon_number_study(
          model, sys, config.study.photon_samples,
          mix_seed(master, kPhotonStreamBase + static_cast<std::uint64_t>(sys.n)),
          opt.jobs));
    }
    write_photon_report(reports, (out / "photon_number.csv").string());
    meta.outputs.push_back("photon_number.csv");
  } else {
    throw ConfigError(
        "unknown study '" + name +
        "' (expected pulse_count, training_size, truncation, bloch_map, "
        "trajectory, azimuthal, or photon_number)");
  }

  write_run_meta(meta, (out / "run_meta.json").string());
  std::cout << "study '" << name << "' written to " << out.string() << "\n";
  return 0;
}

int cmd_inspect(const std::string& checkpoint) {
  const MlpModel model = load_checkpoint(checkpoint);
  std::cout << "n            " << model.n << "\n";
  std::cout << "n_comp       " << model.n_comp << "\n";
  std::cout << "num_pulses   " << model.num_pulses << "\n";
  std::cout << "layer_sizes  ";
  for (std::size_t l = 0; l < model.layer_sizes.size(); ++l)
    std::cout << (l ? "," : "") << model.layer_sizes[l];
  std::cout << "\n";
  std::cout << "activation   " << activation_name(model.activation) << "\n";
  std::cout << "init_seed    " << model.seed << "\n";
  std::size_t params = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l)
    params += static_cast<std::size_t>(model.weights[l].size()) +
              static_cast<std::size_t>(model.biases[l].size());
  std::cout << "parameters   " << params << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"neural pulse-sequence controller for an oscillator-qubit system"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions train_opt;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a controller network");
  add_common_options(train_cmd, train_opt, /*with_jobs=*/true);

  CommonOptions prepare_opt;
  std::string prepare_checkpoint, prepare_target;
  bool prepare_refine = false;
  CLI::App* prepare_cmd = app.add_subcommand(
      "prepare", "print the pulse program for one target state");
  add_common_options(prepare_cmd, prepare_opt, /*with_jobs=*/false);
  prepare_cmd->add_option("--checkpoint", prepare_checkpoint, "trained model")
      ->required();
  prepare_cmd
      ->add_option("--target", prepare_target,
                   "\"theta=T phi=P\" or comma-separated amplitudes")
      ->required();
  prepare_cmd->add_flag("--refine", prepare_refine,
                        "post-process low-fidelity predictions");

  CommonOptions study_opt;
  std::string study_name;
  CLI::App* study_cmd = app.add_subcommand("study", "run a batch study");
  add_common_options(study_cmd, study_opt, /*with_jobs=*/true);
  study_cmd->add_option("name", study_name, "study name")->required();

  CommonOptions refine_opt;
  std::string refine_checkpoint, refine_target;
  CLI::App* refine_cmd = app.add_subcommand(
      "refine", "compare unrefined and refined predictions for one target");
  add_common_options(refine_cmd, refine_opt, /*with_jobs=*/false);
  refine_cmd->add_option("--checkpoint", refine_checkpoint, "trained model")
      ->required();
  refine_cmd
      ->add_option("--target", refine_target,
                   "\"theta=T phi=P\" or comma-separated amplitudes")
      ->required();

  std::string inspect_checkpoint;
  CLI::App* inspect_cmd =
      app.add_subcommand("inspect-checkpoint", "print checkpoint metadata");
  inspect_cmd->add_option("checkpoint", inspect_checkpoint, "checkpoint file")
      ->required();

  int exit_code = 0;
  train_cmd->callback([&] { exit_code = cmd_train(train_opt); });
  prepare_cmd->callback([&] {
    exit_code = cmd_prepare(prepare_opt, prepare_checkpoint, prepare_target,
                            prepare_refine);
  });
  study_cmd->callback([&] { exit_code = cmd_study(study_opt, study_name); });
  refine_cmd->callback(
      [&] { exit_code = cmd_refine(refine_opt, refine_checkpoint, refine_target); });
  inspect_cmd->callback([&] { exit_code = cmd_inspect(inspect_checkpoint); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}

}  // namespace pulseforge
