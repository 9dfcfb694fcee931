#include <cfloat>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/mlp.hpp"

using namespace pulseforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* stem) {
  return fs::temp_directory_path() / (std::string(stem) + ".json");
}

}  // namespace

TEST_CASE("activation values match their definitions") {
  CHECK(activation_value(Activation::kRectifier, 2.5) == 2.5);
  CHECK(activation_value(Activation::kRectifier, -2.5) == 0.0);

  CHECK(activation_value(Activation::kExponentialLinear, 1.2) == 1.2);
  CHECK(activation_value(Activation::kExponentialLinear, -1.0) ==
        doctest::Approx(std::expm1(-1.0)).epsilon(1e-15));

  const double x = 0.7;
  CHECK(activation_value(Activation::kSigmoidWeighted, x) ==
        doctest::Approx(x / (1.0 + std::exp(-x))).epsilon(1e-15));
  CHECK(activation_value(Activation::kSigmoidWeighted, 0.0) == 0.0);
}

TEST_CASE("activation derivatives agree with central differences") {
  const double eps = 1e-6;
  for (Activation act : {Activation::kRectifier, Activation::kExponentialLinear,
                         Activation::kSigmoidWeighted}) {
    for (double x : {-2.1, -0.4, 0.3, 1.7}) {
      const double numeric = (activation_value(act, x + eps) -
                              activation_value(act, x - eps)) /
                             (2.0 * eps);
      CHECK(activation_derivative(act, x) ==
            doctest::Approx(numeric).epsilon(1e-7));
    }
  }
}

TEST_CASE("activation names parse with their aliases") {
  CHECK(parse_activation("rectifier") == Activation::kRectifier);
  CHECK(parse_activation("relu") == Activation::kRectifier);
  CHECK(parse_activation("exponential-linear") == Activation::kExponentialLinear);
  CHECK(parse_activation("elu") == Activation::kExponentialLinear);
  CHECK(parse_activation("sigmoid-weighted") == Activation::kSigmoidWeighted);
  CHECK(parse_activation("silu") == Activation::kSigmoidWeighted);
  CHECK_THROWS_AS(parse_activation("tanh"), ConfigError);
  CHECK(parse_activation(activation_name(Activation::kExponentialLinear)) ==
        Activation::kExponentialLinear);
}

TEST_CASE("softplus is accurate across magnitudes") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(softplus(3.0) == doctest::Approx(std::log1p(std::exp(3.0))).epsilon(1e-15));
  CHECK(softplus(100.0) == 100.0);          // saturation, no overflow
  CHECK(softplus(-100.0) == doctest::Approx(std::exp(-100.0)).epsilon(1e-12));
  CHECK(softplus(-40.0) > 0.0);             // strictly positive everywhere
}

TEST_CASE("initialization is fan-balanced, deterministic, zero-biased") {
  const int d = 8, pulses = 5;
  const MlpModel model = init_model(d, pulses, 31, {10, 20});
  REQUIRE(model.layer_sizes == std::vector<int>{8, 10, 20, 21});
  REQUIRE(model.num_layers() == 3);

  for (int l = 0; l < model.num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / (model.layer_sizes[l] +
                                          model.layer_sizes[l + 1]));
    CHECK(model.weights[l].cwiseAbs().maxCoeff() <= bound);
    CHECK(model.weights[l].cwiseAbs().maxCoeff() > 0.5 * bound);  // spread
    CHECK(model.biases[l].cwiseAbs().maxCoeff() == 0.0);
  }

  const MlpModel again = init_model(d, pulses, 31, {10, 20});
  for (int l = 0; l < model.num_layers(); ++l)
    CHECK((model.weights[l] - again.weights[l]).cwiseAbs().maxCoeff() == 0.0);

  const MlpModel other = init_model(d, pulses, 32, {10, 20});
  CHECK((model.weights[0] - other.weights[0]).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("weights are drawn row-major from the seeded generator") {
  const MlpModel model = init_model(3, 2, 77, {2});
  std::mt19937_64 rng(77);
  const double bound0 = std::sqrt(6.0 / (3 + 2));
  std::uniform_real_distribution<double> uni0(-bound0, bound0);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(model.weights[0](r, c) == uni0(rng));
  const double bound1 = std::sqrt(6.0 / (2 + 9));
  std::uniform_real_distribution<double> uni1(-bound1, bound1);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(model.weights[1](r, c) == uni1(rng));
}

TEST_CASE("forward pass on a hand-computed network") {
  MlpModel model;
  model.layer_sizes = {2, 2, 5};
  model.num_pulses = 1;  // head width 4*1 + 1
  model.activation = Activation::kRectifier;
  model.weights.resize(2);
  model.biases.resize(2);
  model.weights[0].resize(2, 2);
  model.weights[0] << 1.0, -1.0, 0.5, 2.0;
  model.biases[0] = Eigen::Vector2d(0.1, -3.5);
  model.weights[1].resize(5, 2);
  model.weights[1] << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, -1.0, 0.5, 3.0;
  model.biases[1] = (Eigen::VectorXd(5) << 0.0, 0.5, -1.0, 0.25, 0.0).finished();
  model.validate();

  const Eigen::Vector2d in(2.0, 1.0);
  // Hidden pre: (1*2 - 1*1 + 0.1, 0.5*2 + 2*1 - 3.5) = (1.1, -0.5)
  // Hidden post (rectifier): (1.1, 0)
  // Output (affine): (1.1, 0.5, 0.1, 2.45, 0.55)
  ActivationTrace trace;
  const Eigen::VectorXd out = forward(model, in, &trace);
  REQUIRE(out.size() == 5);
  CHECK(out[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(out[2] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(out[3] == doctest::Approx(2.45).epsilon(1e-15));
  CHECK(out[4] == doctest::Approx(0.55).epsilon(1e-15));

  REQUIRE(trace.pre.size() == 2);
  CHECK(trace.pre[0][1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(trace.post[0][1] == 0.0);
  CHECK(trace.post[1] == trace.pre[1]);  // affine head
}

TEST_CASE("raw outputs decode into pulse slots and a positive duration") {
  const int pulses = 3;
  Eigen::VectorXd raw(4 * pulses + 1);
  raw << 0.1, 0.2, 0.3, 0.4,  // pulse 1
         -1.0, -2.0, -3.0, -4.0,  // pulse 2
         5.0, 6.0, 7.0, 8.0,  // pulse 3
         0.25;  // duration head
  const PulseSequence seq = decode_outputs(raw, pulses);
  REQUIRE(seq.pulses.size() == 3);
  CHECK(seq.pulses[0].zeta == 0.1);
  CHECK(seq.pulses[0].xi == 0.2);
  CHECK(seq.pulses[0].phi == 0.3);
  CHECK(seq.pulses[0].varphi == 0.4);
  CHECK(seq.pulses[1].zeta == -1.0);
  CHECK(seq.pulses[2].varphi == 8.0);
  CHECK(seq.total_time ==
        doctest::Approx(kTauMin + softplus(0.25)).epsilon(1e-15));
  CHECK(seq.slice_time() == doctest::Approx(seq.total_time / 3).epsilon(1e-15));

  // Amplitudes keep their sign; only the duration is squashed positive.
  CHECK(seq.pulses[1].zeta < 0.0);
  CHECK(seq.total_time > kTauMin);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  const MlpModel model = init_model(8, 4, 1234, {7, 9},
                                    Activation::kSigmoidWeighted);
  const fs::path path = temp_file("pulseforge_ckpt_roundtrip");
  save_checkpoint(model, path.string());
  const MlpModel loaded = load_checkpoint(path.string());

  CHECK(loaded.layer_sizes == model.layer_sizes);
  CHECK(loaded.activation == model.activation);
  CHECK(loaded.n == model.n);
  CHECK(loaded.n_comp == model.n_comp);
  CHECK(loaded.num_pulses == model.num_pulses);
  CHECK(loaded.seed == model.seed);
  for (int l = 0; l < model.num_layers(); ++l) {
    CHECK((loaded.weights[l] - model.weights[l]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.biases[l] - model.biases[l]).cwiseAbs().maxCoeff() == 0.0);
  }
  fs::remove(path);
}

TEST_CASE("checkpoint writer preserves awkward doubles exactly") {
  MlpModel model = init_model(3, 1, 5, {2});
  model.weights[0](0, 0) = 0.1;                   // not dyadic
  model.weights[0](0, 1) = 1.0 + DBL_EPSILON;     // needs all 17 digits
  model.weights[0](1, 2) = -3.123456789012345e-7;
  const fs::path path = temp_file("pulseforge_ckpt_digits");
  save_checkpoint(model, path.string());
  const MlpModel loaded = load_checkpoint(path.string());
  CHECK(loaded.weights[0](0, 0) == 0.1);
  CHECK(loaded.weights[0](0, 1) == 1.0 + DBL_EPSILON);
  CHECK(loaded.weights[0](1, 2) == -3.123456789012345e-7);
  fs::remove(path);
}

TEST_CASE("checkpoint loading rejects malformed input") {
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/checkpoint.json"), ConfigError);

  const fs::path path = temp_file("pulseforge_ckpt_bad");

  std::ofstream(path) << "this is not json";
  CHECK_THROWS_AS(load_checkpoint(path.string()), ConfigError);

  std::ofstream(path) << "{\"format_version\": 99}";
  CHECK_THROWS_AS(load_checkpoint(path.string()), ConfigError);

  // Structurally valid JSON whose weight shapes contradict layer_sizes.
  const MlpModel model = init_model(3, 1, 5, {2});
  save_checkpoint(model, path.string());
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();
  const auto pos = text.find("\"layer_sizes\": [3");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 17, "\"layer_sizes\": [4");
  std::ofstream(path) << text;
  CHECK_THROWS_AS(load_checkpoint(path.string()), ConfigError);
  fs::remove(path);
}

TEST_CASE("model validation catches shape and finiteness violations") {
  MlpModel model = init_model(4, 2, 9, {3});
  model.validate();

  MlpModel wrong_shape = model;
  wrong_shape.weights[0].resize(3, 5);
  CHECK_THROWS_AS(wrong_shape.validate(), ConfigError);

  MlpModel nan_weight = model;
  nan_weight.weights[1](0, 0) = std::nan("");
  CHECK_THROWS_AS(nan_weight.validate(), ConfigError);

  MlpModel bad_head = model;
  bad_head.layer_sizes.back() = 7;  // not 4N+1 for num_pulses = 2
  bad_head.weights[1].resize(7, 3);
  bad_head.biases[1].resize(7);
  bad_head.weights[1].setZero();
  bad_head.biases[1].setZero();
  CHECK_THROWS_AS(bad_head.validate(), ConfigError);
}
