#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pulseforge/cli.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/mlp.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/states.hpp"
#include "pulseforge/studies.hpp"
#include "pulseforge/system.hpp"
#include "pulseforge/train.hpp"
#include "pulseforge/version.hpp"

namespace py = pybind11;

namespace pulseforge {
namespace {

// Default couplings with the dimensions a checkpoint was trained for.
SystemConfig system_for(const MlpModel& model) {
  SystemConfig sys;
  sys.n = model.n;
  sys.n_comp = model.n_comp;
  sys.num_pulses = model.num_pulses;
  sys.validate();
  return sys;
}

SystemConfig resolve_system(const MlpModel& model,
                            const std::optional<SystemConfig>& sys) {
  if (!sys) return system_for(model);
  SystemConfig resolved = *sys;
  resolved.validate();
  return resolved;
}

}  // namespace
}  // namespace pulseforge

PYBIND11_MODULE(_pulseforge, m) {
  using namespace pulseforge;

  m.doc() = "neural pulse-sequence controller for an oscillator-qubit system";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigurationError",
                                      PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalFailure",
                                         PyExc_ArithmeticError);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("n", &SystemConfig::n)
      .def_readwrite("n_comp", &SystemConfig::n_comp)
      .def_readwrite("g", &SystemConfig::g)
      .def_readwrite("delta_c", &SystemConfig::delta_c)
      .def_readwrite("delta_eg", &SystemConfig::delta_eg)
      .def_readwrite("lambda_reg", &SystemConfig::lambda_reg)
      .def_readwrite("num_pulses", &SystemConfig::num_pulses)
      .def("validate", &SystemConfig::validate);

  py::class_<PulseParams>(m, "PulseParams")
      .def_readonly("zeta", &PulseParams::zeta)
      .def_readonly("xi", &PulseParams::xi)
      .def_readonly("phi", &PulseParams::phi)
      .def_readonly("varphi", &PulseParams::varphi)
      .def("__repr__", [](const PulseParams& p) {
        return "PulseParams(zeta=" + std::to_string(p.zeta) +
               ", xi=" + std::to_string(p.xi) +
               ", phi=" + std::to_string(p.phi) +
               ", varphi=" + std::to_string(p.varphi) + ")";
      });

  py::class_<PulseSequence>(m, "PulseSequence")
      .def_readonly("pulses", &PulseSequence::pulses)
      .def_readonly("total_time", &PulseSequence::total_time)
      .def("slice_time", &PulseSequence::slice_time);

  py::class_<Evaluation>(m, "Evaluation")
      .def_readonly("fidelity", &Evaluation::fidelity)
      .def_readonly("purity", &Evaluation::purity)
      .def_readonly("leakage", &Evaluation::leakage)
      .def("__repr__", [](const Evaluation& e) {
        return "Evaluation(fidelity=" + std::to_string(e.fidelity) +
               ", purity=" + std::to_string(e.purity) +
               ", leakage=" + std::to_string(e.leakage) + ")";
      });

  py::class_<RefineResult>(m, "RefineResult")
      .def_readonly("sequence", &RefineResult::sequence)
      .def_readonly("fidelity", &RefineResult::fidelity)
      .def_readonly("used_neighbor", &RefineResult::used_neighbor)
      .def_readonly("accepted", &RefineResult::accepted);

  py::class_<MlpModel>(m, "Model")
      .def_readonly("n", &MlpModel::n)
      .def_readonly("n_comp", &MlpModel::n_comp)
      .def_readonly("num_pulses", &MlpModel::num_pulses)
      .def_readonly("layer_sizes", &MlpModel::layer_sizes)
      .def_readonly("seed", &MlpModel::seed)
      .def_property_readonly(
          "activation",
          [](const MlpModel& model) { return activation_name(model.activation); })
      .def("raw_outputs",
           [](const MlpModel& model, const Eigen::VectorXd& features) {
             return forward(model, features);
           },
           py::arg("features"),
           "network outputs for one feature vector, before decoding")
      .def("predict",
           [](const MlpModel& model, const PureState& target) {
             const Eigen::VectorXd features =
                 featurize(target, su_basis(model.n));
             return decode_outputs(forward(model, features), model.num_pulses);
           },
           py::arg("target"), "decoded pulse sequence for one target state")
      .def("prepare",
           [](const MlpModel& model, const PureState& target,
              const std::optional<SystemConfig>& sys) {
             const SystemConfig resolved = resolve_system(model, sys);
             const OperatorSet ops = build_operators(resolved);
             const PreparedState prepared =
                 prepare_state(model, target, ops, resolved);
             return py::make_tuple(prepared.sequence, prepared.metrics,
                                   prepared.final_state);
           },
           py::arg("target"), py::arg("system") = std::nullopt,
           "(sequence, metrics, final joint state) for one target")
      .def("evaluate",
           [](const MlpModel& model, const std::vector<PureState>& targets,
              const std::optional<SystemConfig>& sys, int jobs) {
             return evaluate(model, targets, resolve_system(model, sys), jobs);
           },
           py::arg("targets"), py::arg("system") = std::nullopt,
           py::arg("jobs") = 1, "per-target metrics over a list of states");

  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));
  m.def("save_checkpoint", &save_checkpoint, py::arg("model"), py::arg("path"));

  m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("stream"),
        "independent deterministic stream seed from a master seed");
  m.def("su_basis", &su_basis, py::arg("n"),
        "traceless Hermitian generator basis, Tr(l_a l_b) = 2 delta_ab");
  m.def("featurize",
        [](const PureState& psi, int n) { return featurize(psi, su_basis(n)); },
        py::arg("psi"), py::arg("n"),
        "generator expectation values of a qudit state");
  m.def("haar_dataset", &haar_dataset, py::arg("count"), py::arg("n"),
        py::arg("seed"), "deterministic batch of Haar-random pure states");
  m.def("bloch_to_state",
        [](double theta, double phi) {
          return bloch_to_state(BlochAngles{theta, phi});
        },
        py::arg("theta"), py::arg("phi"));

  m.def("evaluate_sequence",
        [](const PulseSequence& seq, const PureState& target,
           const SystemConfig& sys) {
          sys.validate();
          return evaluate_sequence(build_operators(sys), sys, seq, target);
        },
        py::arg("sequence"), py::arg("target"), py::arg("system"),
        "simulate one pulse sequence and score it against a target");

  m.def("refine",
        [](const MlpModel& model, const PureState& target, double trigger,
           double accept, int neighbors, double epsilon, std::uint64_t seed,
           const std::optional<SystemConfig>& sys) {
          RefineConfig cfg;
          cfg.trigger = trigger;
          cfg.accept = accept;
          cfg.neighbors = neighbors;
          cfg.epsilon = epsilon;
          cfg.rotation_seed = seed;
          return refine(model, target, cfg, resolve_system(model, sys));
        },
        py::arg("model"), py::arg("target"), py::arg("trigger") = 0.997,
        py::arg("accept") = 0.998, py::arg("neighbors") = 10,
        py::arg("epsilon") = 0.004, py::arg("seed") = 0,
        py::arg("system") = std::nullopt,
        "neighborhood post-processing of one prediction");

  m.def("cli_main",
        [](const std::vector<std::string>& args) {
          std::vector<const char*> argv;
          argv.push_back("pulseforge");
          for (const std::string& arg : args) argv.push_back(arg.c_str());
          return run_cli(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"),
        "run the command-line interface; returns its exit code");
}
