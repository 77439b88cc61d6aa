#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neurojscc/dataset.hpp"
#include "neurojscc/enumeration.hpp"
#include "neurojscc/evaluation.hpp"
#include "neurojscc/experiment.hpp"

namespace py = pybind11;
using namespace neurojscc;

namespace {

py::array_t<std::uint8_t> tensor_to_numpy(const SpikeTensor& t) {
  py::array_t<std::uint8_t> out({t.num_signals(), t.num_steps()});
  auto buf = out.mutable_unchecked<2>();
  for (int j = 0; j < t.num_signals(); ++j) {
    for (int s = 0; s < t.num_steps(); ++s) buf(j, s) = t.get(j, s) ? 1 : 0;
  }
  return out;
}

SpikeTensor tensor_from_numpy(const py::array& arr) {
  const auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
  if (!a || a.ndim() != 2) {
    throw py::value_error("expected a 2-d array of shape (num_signals, num_steps)");
  }
  SpikeTensor t(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  const auto buf = a.unchecked<2>();
  for (py::ssize_t j = 0; j < a.shape(0); ++j) {
    for (py::ssize_t s = 0; s < a.shape(1); ++s) t.set(static_cast<int>(j), static_cast<int>(s), buf(j, s) != 0);
  }
  return t;
}

ExperimentConfig config_from_py(const std::string& config_json) {
  return config_from_json(nlohmann::json::parse(config_json));
}

py::dict metrics_row_to_dict(const MetricsRow& row) {
  py::dict d;
  d["iteration"] = row.iteration;
  d["train_loss"] = row.train_loss ? py::object(py::float_(*row.train_loss)) : py::none();
  d["test_accuracy"] = row.test_accuracy;
  d["snr_db"] = row.snr_db ? py::object(py::float_(*row.snr_db)) : py::none();
  d["sigma2"] = row.sigma2;
  d["rate"] = row.rate;
  d["seed"] = row.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spiking joint source-channel coding: C++ core operations";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<SpikeTensor>(m, "SpikeTensor")
      .def(py::init<int, int>(), py::arg("num_signals"), py::arg("num_steps"))
      .def_property_readonly("num_signals", &SpikeTensor::num_signals)
      .def_property_readonly("num_steps", &SpikeTensor::num_steps)
      .def("get", &SpikeTensor::get)
      .def("set", &SpikeTensor::set)
      .def("spike_count", &SpikeTensor::spike_count)
      .def("density", &SpikeTensor::density)
      .def("to_numpy", &tensor_to_numpy)
      .def_static("from_numpy", &tensor_from_numpy)
      .def("__eq__", [](const SpikeTensor& a, const SpikeTensor& b) { return a == b; });

  py::class_<LabeledExample>(m, "LabeledExample")
      .def_readonly("label", &LabeledExample::label)
      .def_readonly("spikes", &LabeledExample::spikes);

  m.def("generate_synthetic_dataset", &generate_synthetic_dataset, py::arg("num_classes"),
        py::arg("examples_per_class"), py::arg("num_signals"), py::arg("num_steps"),
        py::arg("spike_density"), py::arg("jitter"), py::arg("seed"));
  m.def("target_spike_train", &target_spike_train, py::arg("label"), py::arg("num_outputs"),
        py::arg("num_steps"), py::arg("target_rate") = 1.0);
  m.def("save_dataset", &save_dataset);
  m.def("load_dataset", &load_dataset);

  m.def("quantize", &quantize, py::arg("x"), py::arg("threshold") = 0.5);
  m.def("sigma2_from_snr", &sigma2_from_snr, py::arg("snr_db"), py::arg("rho"));
  m.def("spike_probability", &spike_probability);
  m.def(
      "log_loss",
      [](int spike, double p, double epsilon) { return log_loss(spike, p, epsilon); },
      py::arg("spike"), py::arg("p"), py::arg("epsilon") = 1e-12);
  m.def("measure_density",
        [](const SpikeTensor& t) { return measure_density(t); });

  m.def(
      "channel_step",
      [](double sigma2, double threshold, const py::array& x_col, std::uint64_t seed) {
        SpikeTensor x = tensor_from_numpy(x_col);
        const GaussianQuantizedChannel ch(sigma2, threshold);
        Rng rng(seed);
        SpikeTensor y(x.num_signals(), x.num_steps());
        for (int t = 0; t < x.num_steps(); ++t) ch.step(x, t, y, y.column(t), rng);
        return tensor_to_numpy(y);
      },
      py::arg("sigma2"), py::arg("threshold"), py::arg("x"), py::arg("seed"),
      "Push binary signals through the quantized AWGN channel.");

  m.def(
      "rate_decode",
      [](const SpikeTensor& outputs, int horizon) {
        const auto r = rate_decode(outputs, horizon);
        py::dict d;
        d["predicted_class"] = r.predicted_class;
        d["spike_counts"] = r.spike_counts;
        d["no_spikes"] = r.no_spikes;
        return d;
      },
      py::arg("outputs"), py::arg("horizon"));

  m.def(
      "run_training",
      [](const std::string& config_json) {
        const auto cfg = config_from_py(config_json);
        const auto run = run_training(cfg);
        py::list rows;
        for (const auto& row : run.metrics) rows.append(metrics_row_to_dict(row));
        py::dict d;
        d["metrics"] = rows;
        d["encoder_density"] = run.checkpoint.encoder_density;
        d["final_accuracy"] = run.metrics.empty() ? py::object(py::none())
                                                  : py::object(py::float_(
                                                        run.metrics.back().test_accuracy));
        return d;
      },
      py::arg("config_json"),
      "Run a full training job from a config JSON string; returns the metrics rows.");

  m.def(
      "train_and_save",
      [](const std::string& config_json, const std::string& checkpoint_path) {
        const auto cfg = config_from_py(config_json);
        const auto run = run_training(cfg);
        save_checkpoint(checkpoint_path, run.checkpoint);
        return run.metrics.empty() ? -1.0 : run.metrics.back().test_accuracy;
      },
      py::arg("config_json"), py::arg("checkpoint_path"));

  m.def(
      "evaluate_checkpoint_file",
      [](const std::string& checkpoint_path, const std::string& config_json,
         std::optional<double> test_snr_db) {
        const auto cfg = config_from_py(config_json);
        const auto ck = load_checkpoint(checkpoint_path);
        auto [train, test] = prepare_dataset(cfg);
        const auto ev = evaluate_checkpoint(ck, test, cfg.training.inference_repeats, test_snr_db);
        py::dict d;
        d["accuracy"] = ev.accuracy;
        d["sigma2"] = ev.sigma2;
        d["accuracy_per_step"] = ev.accuracy_per_step;
        return d;
      },
      py::arg("checkpoint_path"), py::arg("config_json"),
      py::arg("test_snr_db") = std::optional<double>{});

  m.def("default_config_json", [] {
    return config_to_json(ExperimentConfig{}).dump(2);
  });
}
