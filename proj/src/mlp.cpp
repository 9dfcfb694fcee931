#include "pulseforge/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pulseforge/errors.hpp"
#include "pulseforge/states.hpp"

namespace pulseforge {

Activation parse_activation(const std::string& name) {
  if (name == "rectifier" || name == "relu") return Activation::kRectifier;
  if (name == "exponential-linear" || name == "elu")
    return Activation::kExponentialLinear;
  if (name == "sigmoid-weighted" || name == "silu")
    return Activation::kSigmoidWeighted;
  throw ConfigError("unknown activation '" + name +
                    "' (expected rectifier, exponential-linear, or sigmoid-weighted)");
}

std::string activation_name(Activation activation) {
  switch (activation) {
    case Activation::kRectifier: return "rectifier";
    case Activation::kExponentialLinear: return "exponential-linear";
    case Activation::kSigmoidWeighted: return "sigmoid-weighted";
  }
  throw ConfigError("invalid activation tag");
}

namespace {
double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}
}  // namespace

double activation_value(Activation activation, double x) {
  switch (activation) {
    case Activation::kRectifier: return x > 0.0 ? x : 0.0;
    case Activation::kExponentialLinear:
      return x > 0.0 ? x : std::expm1(x);
    case Activation::kSigmoidWeighted: return x * sigmoid(x);
  }
  return 0.0;
}

double activation_derivative(Activation activation, double x) {
  switch (activation) {
    case Activation::kRectifier: return x > 0.0 ? 1.0 : 0.0;
    case Activation::kExponentialLinear: return x > 0.0 ? 1.0 : std::exp(x);
    case Activation::kSigmoidWeighted: {
      const double s = sigmoid(x);
      return s * (1.0 + x * (1.0 - s));
    }
  }
  return 0.0;
}

double softplus(double x) {
  // log(1 + e^x) without overflow in either tail.
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

void MlpModel::validate() const {
  if (layer_sizes.size() < 2)
    throw ConfigError("model needs at least input and output layers");
  if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size())
    throw ConfigError("model layer counts are inconsistent");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] ||
        weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1])
      throw ConfigError("model parameter shapes do not chain");
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw ConfigError("model parameters contain non-finite values");
  }
  if (layer_sizes.back() != 4 * num_pulses + 1)
    throw ConfigError("output layer width must be 4*num_pulses + 1");
}

MlpModel init_model(int d, int num_pulses, std::uint64_t seed,
                    const std::vector<int>& hidden_sizes,
                    Activation activation) {
  if (d < 3) throw ConfigError("feature dimension must be at least 3");
  if (num_pulses < 1) throw ConfigError("num_pulses must be at least 1");

  MlpModel model;
  model.layer_sizes.push_back(d);
  for (int h : hidden_sizes) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
    model.layer_sizes.push_back(h);
  }
  model.layer_sizes.push_back(4 * num_pulses + 1);
  model.activation = activation;
  model.num_pulses = num_pulses;
  model.seed = seed;

  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    const int fan_in = model.layer_sizes[l];
    const int fan_out = model.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    // Row-major fill so the draw order matches the checkpoint layout.
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = uniform(rng);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& features,
                        ActivationTrace* trace) {
  if (features.size() != model.input_dim())
    throw ConfigError("feature vector length does not match model input");
  const int layers = model.num_layers();
  if (trace) {
    trace->pre.resize(layers);
    trace->post.resize(layers);
  }
  Eigen::VectorXd x = features;
  for (int l = 0; l < layers; ++l) {
    Eigen::VectorXd pre = model.weights[l] * x + model.biases[l];
    if (l + 1 < layers) {
      x = pre.unaryExpr([&](double v) {
        return activation_value(model.activation, v);
      });
    } else {
      x = pre;  // affine head
    }
    if (trace) {
      trace->pre[l] = std::move(pre);
      trace->post[l] = x;
    }
  }
  return x;
}

PulseSequence decode_outputs(const Eigen::VectorXd& raw, int num_pulses) {
  if (raw.size() != 4 * num_pulses + 1)
    throw ConfigError("raw output length must be 4*num_pulses + 1");
  PulseSequence seq;
  seq.pulses.resize(num_pulses);
  for (int k = 0; k < num_pulses; ++k) {
    seq.pulses[k].zeta = raw(4 * k);
    seq.pulses[k].xi = raw(4 * k + 1);
    seq.pulses[k].phi = raw(4 * k + 2);
    seq.pulses[k].varphi = raw(4 * k + 3);
  }
  seq.total_time = kTauMin + softplus(raw(4 * num_pulses));
  return seq;
}

namespace {

// Full-precision decimal so that parse(print(x)) == x for every double.
std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void append_real_array(std::string& out, const double* data, std::size_t count) {
  out += '[';
  for (std::size_t k = 0; k < count; ++k) {
    if (k) out += ',';
    out += format_real(data[k]);
  }
  out += ']';
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::string& path) {
  model.validate();
  std::string out;
  out += "{\n";
  out += "  \"format_version\": 1,\n";
  out += "  \"n\": " + std::to_string(model.n) + ",\n";
  out += "  \"n_comp\": " + std::to_string(model.n_comp) + ",\n";
  out += "  \"num_pulses\": " + std::to_string(model.num_pulses) + ",\n";
  out += "  \"layer_sizes\": [";
  for (std::size_t l = 0; l < model.layer_sizes.size(); ++l) {
    if (l) out += ',';
    out += std::to_string(model.layer_sizes[l]);
  }
  out += "],\n";
  out += "  \"activation\": \"" + activation_name(model.activation) + "\",\n";
  out += "  \"seed\": " + std::to_string(model.seed) + ",\n";
  out += "  \"weights\": [\n";
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    // Row-major serialization regardless of in-memory layout.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor> w = model.weights[l];
    out += "    ";
    append_real_array(out, w.data(), static_cast<std::size_t>(w.size()));
    out += (l + 1 < model.weights.size()) ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"biases\": [\n";
  for (std::size_t l = 0; l < model.biases.size(); ++l) {
    out += "    ";
    append_real_array(out, model.biases[l].data(),
                      static_cast<std::size_t>(model.biases[l].size()));
    out += (l + 1 < model.biases.size()) ? ",\n" : "\n";
  }
  out += "  ]\n";
  out += "}\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open checkpoint file for writing: " + path);
  file << out;
  if (!file) throw ConfigError("failed writing checkpoint: " + path);
}

MlpModel load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open checkpoint file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed checkpoint " + path + ": " + e.what());
  }

  MlpModel model;
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != 1)
      throw ConfigError("unsupported checkpoint format version " +
                        std::to_string(version));
    model.n = doc.at("n").get<int>();
    model.n_comp = doc.at("n_comp").get<int>();
    model.num_pulses = doc.at("num_pulses").get<int>();
    model.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    model.activation = parse_activation(doc.at("activation").get<std::string>());
    model.seed = doc.at("seed").get<std::uint64_t>();

    const auto& weights = doc.at("weights");
    const auto& biases = doc.at("biases");
    if (weights.size() + 1 != model.layer_sizes.size() ||
        biases.size() != weights.size())
      throw ConfigError("checkpoint layer counts are inconsistent");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      const int rows = model.layer_sizes[l + 1];
      const int cols = model.layer_sizes[l];
      const auto flat = weights[l].get<std::vector<double>>();
      if (static_cast<int>(flat.size()) != rows * cols)
        throw ConfigError("checkpoint weight block " + std::to_string(l) +
                          " has wrong size");
      Eigen::MatrixXd w(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) w(r, c) = flat[r * cols + c];
      model.weights.push_back(std::move(w));
      const auto b = biases[l].get<std::vector<double>>();
      if (static_cast<int>(b.size()) != rows)
        throw ConfigError("checkpoint bias block " + std::to_string(l) +
                          " has wrong size");
      model.biases.push_back(
          Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed checkpoint " + path + ": " + e.what());
  }
  model.validate();
  return model;
}

}  // namespace pulseforge
