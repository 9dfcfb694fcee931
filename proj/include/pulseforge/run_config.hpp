#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "pulseforge/quantum.hpp"
#include "pulseforge/studies.hpp"
#include "pulseforge/system.hpp"
#include "pulseforge/train.hpp"

namespace pulseforge {

// Study-specific knobs, one flat block; each study reads its own subset.
struct StudyConfig {
  // pulse_count
  int pulse_min = 2;
  int pulse_max = 9;
  int seeds_per_point = 3;
  int eval_states = 1000;
  // training_size
  std::vector<int> sizes = {256, 512, 1024, 2048, 4096};
  int seeds_per_size = 3;
  // truncation
  std::vector<int> n_comp_candidates = {3, 4, 5, 6, 7};
  int n_prepared_max = 12;
  int truncation_targets = 100;
  // bloch_map
  int resolution_theta = 250;
  int resolution_phi = 250;
  // trajectory
  std::string target = "0,1";  // amplitude list or "theta=.. phi=.." form
  int samples_per_pulse = 20;
  // azimuthal
  double theta_over_pi = 0.65;
  int phi_samples = 100;
  // photon_number
  int photon_samples = 10000;
  std::string checkpoint_n2;
  std::string checkpoint_n3;
  // refinement
  double refine_trigger = 0.997;
  double refine_accept = 0.998;
  int refine_neighbors = 10;
  double refine_epsilon = 0.004;
};

struct IoConfig {
  std::string out_dir = "runs/latest";
  std::string checkpoint;  // input checkpoint for evaluation-style commands
};

struct SeedsConfig {
  std::uint64_t master = 1;
};

// Everything a run needs, resolved from defaults plus one sectioned
// key-value file. Unknown sections or keys are rejected outright.
struct RunConfig {
  SystemConfig system;
  TrainConfig training;
  StudyConfig study;
  IoConfig io;
  SeedsConfig seeds;

  // "section.key" entries the file set explicitly (for precedence rules
  // and mismatch checks against checkpoint metadata).
  std::set<std::string> explicit_keys;

  bool was_set(const std::string& section_dot_key) const {
    return explicit_keys.count(section_dot_key) > 0;
  }
};

// Parses the sectioned key = value format ('#' or ';' start a comment).
// Sections: [system], [training], [study], [io], [seeds]. Throws
// ConfigError with the offending line on any unknown section/key or
// malformed value.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Writes every field back out in canonical order; reals keep 17
// significant digits so the echo is itself a valid, equivalent config.
void write_resolved_config(const RunConfig& config, const std::string& path);

// Target-state specification: either "theta=T phi=P" Bloch angles (n = 2
// only) or a comma-separated amplitude list — n reals, or 2n reals as
// re,im pairs. A non-unit input is normalized and *normalized is set.
// Throws ConfigError for malformed or unnormalizable input.
PureState parse_target(const std::string& spec, int n,
                       bool* normalized = nullptr);

}  // namespace pulseforge
