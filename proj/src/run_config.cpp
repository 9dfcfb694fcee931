#include "pulseforge/run_config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pulseforge/errors.hpp"

namespace pulseforge {

namespace {

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  std::size_t last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

long long to_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("value for '" + key + "' is not an integer: " + value);
  }
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(value, &used);
    if (used != value.size() || value.find('-') != std::string::npos)
      throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("value for '" + key +
                      "' is not an unsigned integer: " + value);
  }
}

double to_real(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(parsed))
      throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("value for '" + key + "' is not a number: " + value);
  }
}

std::vector<int> to_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("empty entry in list for '" + key + "'");
    out.push_back(static_cast<int>(to_int(item, key)));
  }
  if (out.empty()) throw ConfigError("empty list for '" + key + "'");
  return out;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(values[k]);
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;

  // One setter per known key; anything not in the table is rejected.
  using Setter = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Setter> setters;
  const auto add = [&](const std::string& name, Setter setter) {
    setters[name] = std::move(setter);
  };

  add("system.n", [&](const std::string& k, const std::string& v) {
    config.system.n = static_cast<int>(to_int(v, k));
  });
  add("system.n_comp", [&](const std::string& k, const std::string& v) {
    config.system.n_comp = static_cast<int>(to_int(v, k));
  });
  add("system.g", [&](const std::string& k, const std::string& v) {
    config.system.g = to_real(v, k);
  });
  add("system.delta_c", [&](const std::string& k, const std::string& v) {
    config.system.delta_c = to_real(v, k);
  });
  add("system.delta_eg", [&](const std::string& k, const std::string& v) {
    config.system.delta_eg = to_real(v, k);
  });
  add("system.lambda", [&](const std::string& k, const std::string& v) {
    config.system.lambda_reg = to_real(v, k);
  });
  add("system.num_pulses", [&](const std::string& k, const std::string& v) {
    config.system.num_pulses = static_cast<int>(to_int(v, k));
  });

  add("training.dataset_size", [&](const std::string& k, const std::string& v) {
    config.training.dataset_size = static_cast<int>(to_int(v, k));
  });
  add("training.validation_size",
      [&](const std::string& k, const std::string& v) {
        config.training.validation_size = static_cast<int>(to_int(v, k));
      });
  add("training.batch_size", [&](const std::string& k, const std::string& v) {
    config.training.batch_size = static_cast<int>(to_int(v, k));
  });
  add("training.learning_rate", [&](const std::string& k, const std::string& v) {
    config.training.learning_rate = to_real(v, k);
  });
  add("training.beta1", [&](const std::string& k, const std::string& v) {
    config.training.beta1 = to_real(v, k);
  });
  add("training.beta2", [&](const std::string& k, const std::string& v) {
    config.training.beta2 = to_real(v, k);
  });
  add("training.epsilon", [&](const std::string& k, const std::string& v) {
    config.training.epsilon = to_real(v, k);
  });
  add("training.max_epochs", [&](const std::string& k, const std::string& v) {
    config.training.max_epochs = static_cast<int>(to_int(v, k));
  });
  add("training.patience", [&](const std::string& k, const std::string& v) {
    config.training.patience = static_cast<int>(to_int(v, k));
  });
  add("training.hidden_sizes", [&](const std::string& k, const std::string& v) {
    config.training.hidden_sizes = to_int_list(v, k);
  });
  add("training.activation", [&](const std::string& k, const std::string& v) {
    (void)k;
    config.training.activation = parse_activation(v);
  });

  add("study.pulse_min", [&](const std::string& k, const std::string& v) {
    config.study.pulse_min = static_cast<int>(to_int(v, k));
  });
  add("study.pulse_max", [&](const std::string& k, const std::string& v) {
    config.study.pulse_max = static_cast<int>(to_int(v, k));
  });
  add("study.seeds_per_point", [&](const std::string& k, const std::string& v) {
    config.study.seeds_per_point = static_cast<int>(to_int(v, k));
  });
  add("study.eval_states", [&](const std::string& k, const std::string& v) {
    config.study.eval_states = static_cast<int>(to_int(v, k));
  });
  add("study.sizes", [&](const std::string& k, const std::string& v) {
    config.study.sizes = to_int_list(v, k);
  });
  add("study.seeds_per_size", [&](const std::string& k, const std::string& v) {
    config.study.seeds_per_size = static_cast<int>(to_int(v, k));
  });
  add("study.n_comp_candidates",
      [&](const std::string& k, const std::string& v) {
        config.study.n_comp_candidates = to_int_list(v, k);
      });
  add("study.n_prepared_max", [&](const std::string& k, const std::string& v) {
    config.study.n_prepared_max = static_cast<int>(to_int(v, k));
  });
  add("study.truncation_targets",
      [&](const std::string& k, const std::string& v) {
        config.study.truncation_targets = static_cast<int>(to_int(v, k));
      });
  add("study.resolution_theta",
      [&](const std::string& k, const std::string& v) {
        config.study.resolution_theta = static_cast<int>(to_int(v, k));
      });
  add("study.resolution_phi", [&](const std::string& k, const std::string& v) {
    config.study.resolution_phi = static_cast<int>(to_int(v, k));
  });
  add("study.target", [&](const std::string& k, const std::string& v) {
    (void)k;
    config.study.target = v;
  });
  add("study.samples_per_pulse",
      [&](const std::string& k, const std::string& v) {
        config.study.samples_per_pulse = static_cast<int>(to_int(v, k));
      });
  add("study.theta_over_pi", [&](const std::string& k, const std::string& v) {
    config.study.theta_over_pi = to_real(v, k);
  });
  add("study.phi_samples", [&](const std::string& k, const std::string& v) {
    config.study.phi_samples = static_cast<int>(to_int(v, k));
  });
  add("study.photon_samples", [&](const std::string& k, const std::string& v) {
    config.study.photon_samples = static_cast<int>(to_int(v, k));
  });
  add("study.checkpoint_n2", [&](const std::string& k, const std::string& v) {
    (void)k;
    config.study.checkpoint_n2 = v;
  });
  add("study.checkpoint_n3", [&](const std::string& k, const std::string& v) {
    (void)k;
    config.study.checkpoint_n3 = v;
  });
  add("study.refine_trigger", [&](const std::string& k, const std::string& v) {
    config.study.refine_trigger = to_real(v, k);
  });
  add("study.refine_accept", [&](const std::string& k, const std::string& v) {
    config.study.refine_accept = to_real(v, k);
  });
  add("study.refine_neighbors",
      [&](const std::string& k, const std::string& v) {
        config.study.refine_neighbors = static_cast<int>(to_int(v, k));
      });
  add("study.refine_epsilon", [&](const std::string& k, const std::string& v) {
    config.study.refine_epsilon = to_real(v, k);
  });

  add("io.out_dir", [&](const std::string& k, const std::string& v) {
    (void)k;
    config.io.out_dir = v;
  });
  add("io.checkpoint", [&](const std::string& k, const std::string& v) {
    (void)k;
    config.io.checkpoint = v;
  });

  add("seeds.master", [&](const std::string& k, const std::string& v) {
    config.seeds.master = to_u64(v, k);
  });

  static const std::set<std::string> kSections = {"system", "training", "study",
                                                  "io", "seeds"};
  std::string section;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_number) +
                          ": malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError("line " + std::to_string(line_number) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected key = value, got: " + line);
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_number) +
                        ": key before any [section] header");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    const auto setter = setters.find(full);
    if (setter == setters.end())
      throw ConfigError("line " + std::to_string(line_number) +
                        ": unknown key '" + key + "' in section [" + section +
                        "]");
    try {
      setter->second(full, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_number) + ": " +
                        e.what());
    }
    config.explicit_keys.insert(full);
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config file: " + path);
  std::ostringstream content;
  content << file.rdbuf();
  return parse_config_text(content.str());
}

void write_resolved_config(const RunConfig& config, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write resolved config: " + path);
  file << "# fully resolved configuration (defaults filled in)\n";
  file << "[system]\n";
  file << "n = " << config.system.n << "\n";
  file << "n_comp = " << config.system.n_comp << "\n";
  file << "g = " << format_real(config.system.g) << "\n";
  file << "delta_c = " << format_real(config.system.delta_c) << "\n";
  file << "delta_eg = " << format_real(config.system.delta_eg) << "\n";
  file << "lambda = " << format_real(config.system.lambda_reg) << "\n";
  file << "num_pulses = " << config.system.num_pulses << "\n";
  file << "\n[training]\n";
  file << "dataset_size = " << config.training.dataset_size << "\n";
  file << "validation_size = " << config.training.validation_size << "\n";
  file << "batch_size = " << config.training.batch_size << "\n";
  file << "learning_rate = " << format_real(config.training.learning_rate)
       << "\n";
  file << "beta1 = " << format_real(config.training.beta1) << "\n";
  file << "beta2 = " << format_real(config.training.beta2) << "\n";
  file << "epsilon = " << format_real(config.training.epsilon) << "\n";
  file << "max_epochs = " << config.training.max_epochs << "\n";
  file << "patience = " << config.training.patience << "\n";
  file << "hidden_sizes = " << join_ints(config.training.hidden_sizes) << "\n";
  file << "activation = " << activation_name(config.training.activation)
       << "\n";
  file << "\n[study]\n";
  file << "pulse_min = " << config.study.pulse_min << "\n";
  file << "pulse_max = " << config.study.pulse_max << "\n";
  file << "seeds_per_point = " << config.study.seeds_per_point << "\n";
  file << "eval_states = " << config.study.eval_states << "\n";
  file << "sizes = " << join_ints(config.study.sizes) << "\n";
  file << "seeds_per_size = " << config.study.seeds_per_size << "\n";
  file << "n_comp_candidates = " << join_ints(config.study.n_comp_candidates)
       << "\n";
  file << "n_prepared_max = " << config.study.n_prepared_max << "\n";
  file << "truncation_targets = " << config.study.truncation_targets << "\n";
  file << "resolution_theta = " << config.study.resolution_theta << "\n";
  file << "resolution_phi = " << config.study.resolution_phi << "\n";
  file << "target = " << config.study.target << "\n";
  file << "samples_per_pulse = " << config.study.samples_per_pulse << "\n";
  file << "theta_over_pi = " << format_real(config.study.theta_over_pi) << "\n";
  file << "phi_samples = " << config.study.phi_samples << "\n";
  file << "photon_samples = " << config.study.photon_samples << "\n";
  file << "checkpoint_n2 = " << config.study.checkpoint_n2 << "\n";
  file << "checkpoint_n3 = " << config.study.checkpoint_n3 << "\n";
  file << "refine_trigger = " << format_real(config.study.refine_trigger)
       << "\n";
  file << "refine_accept = " << format_real(config.study.refine_accept) << "\n";
  file << "refine_neighbors = " << config.study.refine_neighbors << "\n";
  file << "refine_epsilon = " << format_real(config.study.refine_epsilon)
       << "\n";
  file << "\n[io]\n";
  file << "out_dir = " << config.io.out_dir << "\n";
  file << "checkpoint = " << config.io.checkpoint << "\n";
  file << "\n[seeds]\n";
  file << "master = " << config.seeds.master << "\n";
  if (!file) throw ConfigError("failed writing resolved config: " + path);
}

PureState parse_target(const std::string& spec, int n, bool* normalized) {
  if (normalized) *normalized = false;
  const std::string text = trim(spec);
  if (text.empty()) throw ConfigError("empty target specification");

  if (text.find("theta=") != std::string::npos) {
    if (n != 2)
      throw ConfigError("Bloch-angle targets are only defined for n = 2");
    double theta = 0.0, phi = 0.0;
    bool have_theta = false;
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) {
      const std::size_t eq = token.find('=');
      if (eq == std::string::npos)
        throw ConfigError("malformed target token: " + token);
      const std::string key = token.substr(0, eq);
      const double value = to_real(token.substr(eq + 1), "target " + key);
      if (key == "theta") {
        theta = value;
        have_theta = true;
      } else if (key == "phi") {
        phi = value;
      } else {
        throw ConfigError("unknown target key: " + key);
      }
    }
    if (!have_theta) throw ConfigError("Bloch target needs theta=");
    if (theta < 0.0 || theta > std::acos(-1.0) + 1e-12)
      throw ConfigError("theta must lie in [0, pi]");
    return bloch_to_state({theta, phi});
  }

  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ','))
    values.push_back(to_real(trim(item), "target amplitude"));
  PureState psi(n);
  if (static_cast<int>(values.size()) == n) {
    for (int j = 0; j < n; ++j) psi(j) = values[j];
  } else if (static_cast<int>(values.size()) == 2 * n) {
    for (int j = 0; j < n; ++j)
      psi(j) = std::complex<double>(values[2 * j], values[2 * j + 1]);
  } else {
    throw ConfigError("target needs " + std::to_string(n) + " real or " +
                      std::to_string(2 * n) +
                      " interleaved re,im amplitudes, got " +
                      std::to_string(values.size()));
  }
  const double norm = psi.norm();
  if (norm < 1e-12)
    throw ConfigError("target amplitudes have vanishing norm");
  if (std::abs(norm - 1.0) > 1e-9) {
    psi /= norm;
    if (normalized) *normalized = true;
  }
  return psi;
}

}  // namespace pulseforge
