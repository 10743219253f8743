#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "aoselm/config.hpp"
#include "aoselm/datasets.hpp"
#include "aoselm/drift.hpp"
#include "aoselm/errors.hpp"
#include "aoselm/experiment.hpp"
#include "aoselm/metrics.hpp"
#include "aoselm/monitor.hpp"
#include "aoselm/numerics.hpp"
#include "aoselm/sequential.hpp"
#include "aoselm/serialize.hpp"

namespace py = pybind11;
using namespace aoselm;

namespace {

LabeledBatch batch_of(const DenseMatrix& X, const DenseMatrix& T) { return {X, T}; }

py::dict report_dict(const Report& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    rows.append(py::dict(py::arg("trial") = row.trial, py::arg("seed") = row.seed,
                         py::arg("concept") = row.concept_name, py::arg("metric") = row.metric,
                         py::arg("value") = row.value));
  }
  py::list ranks;
  for (const auto& k : r.ranks) {
    ranks.append(py::dict(py::arg("trial") = k.trial, py::arg("seed") = k.seed,
                          py::arg("position") = k.position, py::arg("L_before") = k.L_before,
                          py::arg("delta_L") = k.delta_L, py::arg("batch") = k.batch,
                          py::arg("rank_before") = k.rank_before,
                          py::arg("rank_after") = k.rank_after, py::arg("flagged") = k.flagged,
                          py::arg("solver_failed") = k.solver_failed));
  }
  py::list events;
  for (const auto& e : r.events) {
    events.append(py::dict(py::arg("trial") = e.trial, py::arg("seed") = e.seed,
                           py::arg("position") = e.position,
                           py::arg("state") = std::string(to_string(e.state))));
  }
  return py::dict(py::arg("protocol") = r.protocol, py::arg("rows") = rows,
                  py::arg("ranks") = ranks, py::arg("events") = events);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive online sequential random-feature networks";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<UnknownConceptError>(m, "UnknownConceptError", base.ptr());
  auto format = py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<VersionError>(m, "VersionError", format.ptr());
  py::register_exception<ChecksumError>(m, "ChecksumError", format.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_property_readonly("seed", &RngStream::seed)
      .def("uniform01", &RngStream::uniform01)
      .def("normal", &RngStream::normal)
      .def("below", &RngStream::below)
      .def("fork", &RngStream::fork, py::arg("tag"));

  py::enum_<InitScheme>(m, "InitScheme").value("NORM", InitScheme::Norm).value("ROS", InitScheme::Ros);
  py::enum_<Activation>(m, "Activation")
      .value("SIGMOID", Activation::Sigmoid)
      .value("TANH", Activation::Tanh);

  py::class_<ConceptBlock>(m, "ConceptBlock")
      .def_readonly("concept_id", &ConceptBlock::concept_id)
      .def_readonly("col_start", &ConceptBlock::col_start)
      .def_readonly("width", &ConceptBlock::width)
      .def_readonly("gain", &ConceptBlock::gain)
      .def("__repr__", [](const ConceptBlock& b) {
        return "ConceptBlock(id=" + std::to_string(b.concept_id) + ", cols=" +
               std::to_string(b.col_start) + ".." + std::to_string(b.col_start + b.width) +
               ", gain=" + std::to_string(b.gain) + ")";
      });

  py::class_<ElmModel>(m, "Model")
      .def_property_readonly("d", &ElmModel::d)
      .def_property_readonly("L", &ElmModel::L)
      .def_property_readonly("m", &ElmModel::m)
      .def_readonly("A", &ElmModel::A)
      .def_readonly("b", &ElmModel::b)
      .def_readonly("K", &ElmModel::K)
      .def_readonly("beta", &ElmModel::beta)
      .def_readonly("c", &ElmModel::c)
      .def_readonly("scheme", &ElmModel::scheme)
      .def_readonly("activation", &ElmModel::activation)
      .def_readonly("concepts", &ElmModel::concepts)
      .def("copy", [](const ElmModel& self) { return self; })
      .def("check_invariants", &ElmModel::check_invariants);

  m.def("init_model", &init_model, py::arg("d"), py::arg("L"), py::arg("m"),
        py::arg("scheme"), py::arg("c"), py::arg("rng"),
        py::arg("activation") = Activation::Sigmoid,
        "New model; X arguments everywhere are d x N (one column per sample).");
  m.def("hidden_activations", &hidden_activations, py::arg("model"), py::arg("X"));
  m.def("predict_scores", &predict_scores, py::arg("model"), py::arg("X"));
  m.def("classify", &classify, py::arg("model"), py::arg("X"),
        py::arg("concept") = std::optional<int>{});
  m.def("predict_regression", &predict_regression, py::arg("model"), py::arg("X"),
        py::arg("concept"));

  m.def(
      "oselm_update",
      [](ElmModel& model, const DenseMatrix& X, const DenseMatrix& T) {
        oselm_update(model, batch_of(X, T));
      },
      py::arg("model"), py::arg("X"), py::arg("T"));
  m.def(
      "ceoselm_update",
      [](ElmModel& model, const DenseMatrix& X, const DenseMatrix& T, Index delta_L,
         RngStream& rng) { ceoselm_update(model, batch_of(X, T), GrowthSpec{delta_L, &rng}); },
      py::arg("model"), py::arg("X"), py::arg("T"), py::arg("delta_L"), py::arg("rng"));

  m.def("adapt_virtual", &adapt_virtual, py::arg("model"), py::arg("new_d"), py::arg("rng"));
  m.def("adapt_real", &adapt_real, py::arg("model"), py::arg("added_m"),
        py::arg("as_new_concept") = true);
  m.def("adapt_hybrid", &adapt_hybrid, py::arg("model"), py::arg("new_d"), py::arg("added_m"),
        py::arg("as_new_concept"), py::arg("rng"));
  m.def("set_concept_gain", &set_concept_gain, py::arg("model"), py::arg("concept"),
        py::arg("gain"));
  m.def("fit_concept_gain", &fit_concept_gain, py::arg("model"), py::arg("concept"),
        py::arg("X"), py::arg("y"), py::arg("grid") = default_gain_grid());
  m.def("p_hat_rank", &p_hat_rank, py::arg("K"));

  m.def("ridge_solve", &ridge_solve, py::arg("H"), py::arg("T"), py::arg("c"));
  m.def("spd_solve", &spd_solve, py::arg("K"), py::arg("B"));
  m.def(
      "numeric_rank", [](const DenseMatrix& a) { return numeric_rank(a); }, py::arg("matrix"));

  m.def("model_to_bytes", [](const ElmModel& model) {
    const auto bytes = model_to_bytes(model);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  });
  m.def("model_from_bytes", [](const py::bytes& data) {
    const std::string s = data;
    return model_from_bytes(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  });
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<LabeledSamples>(m, "LabeledSamples")
      .def_readonly("X", &LabeledSamples::X)
      .def_readonly("labels", &LabeledSamples::labels);
  m.def("gen_sea", &gen_sea, py::arg("n"), py::arg("concept"), py::arg("noise"), py::arg("rng"));
  m.def("gen_stagger", &gen_stagger, py::arg("n"), py::arg("concept"), py::arg("rng"));
  m.def("one_hot", &one_hot, py::arg("labels"), py::arg("classes"));
  m.def("hog_matrix", &hog_matrix, py::arg("images"));

  py::enum_<MonitorState>(m, "MonitorState")
      .value("STABLE", MonitorState::Stable)
      .value("WARNING", MonitorState::Warning)
      .value("DRIFT", MonitorState::Drift);
  py::class_<DriftMonitor>(m, "DriftMonitor")
      .def(py::init([](std::size_t window, std::size_t warn_threshold, double drift_threshold) {
             return DriftMonitor(MonitorParams{window, warn_threshold, drift_threshold});
           }),
           py::arg("window") = 200, py::arg("warn_threshold") = 30,
           py::arg("drift_threshold") = 0.2)
      .def("observe", &DriftMonitor::observe, py::arg("correct"))
      .def("acknowledge", &DriftMonitor::acknowledge)
      .def_property_readonly("state", &DriftMonitor::state)
      .def_property_readonly("best_accuracy", &DriftMonitor::best_accuracy)
      .def_property_readonly("windowed_accuracy", &DriftMonitor::windowed_accuracy);

  m.def(
      "cohen_kappa",
      [](const std::vector<std::vector<std::uint64_t>>& counts) {
        ConfusionMatrix cm(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
          if (counts[i].size() != counts.size()) throw DimensionError("confusion matrix must be square");
          for (std::size_t j = 0; j < counts.size(); ++j) cm.add(i, j, counts[i][j]);
        }
        const KappaResult k = cohen_kappa(cm);
        return py::make_tuple(accuracy(cm), k.kappa, k.kappa_error);
      },
      py::arg("counts"), "(accuracy, kappa, kappa standard error) of a confusion matrix.");

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& settings) {
        ExperimentConfig cfg;
        for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
        }
        return report_dict(r);
      },
      py::arg("settings"), "Runs an experiment from key=value settings (the config file keys).");
  m.def("bench_names", &bench_names);
}
