// Python bindings for the library's main operations: synthetic session
// generation, the windowed feature/label pipeline, model training and
// evaluation, and the metrics/statistics helpers. File-format plumbing stays
// with the CLI; this module works on in-memory arrays.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "emgtcn/checkpoint.hpp"
#include "emgtcn/csv_io.hpp"
#include "emgtcn/experiment.hpp"
#include "emgtcn/labeling.hpp"
#include "emgtcn/metrics.hpp"
#include "emgtcn/signal.hpp"
#include "emgtcn/stats.hpp"
#include "emgtcn/synth.hpp"

namespace py = pybind11;
using namespace emgtcn;

namespace {

std::vector<EmgRecord> emg_from_array(const Matrix& array) {
  std::vector<EmgRecord> records;
  records.reserve(static_cast<std::size_t>(array.rows()));
  for (Eigen::Index k = 0; k < array.rows(); ++k) {
    EmgRecord rec;
    rec.t = k;
    rec.channels = array.row(k).transpose();
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<JointState> joints_from_array(const Matrix& array) {
  if (array.cols() != kNumDofs)
    throw std::invalid_argument("joints array must have 3 columns");
  std::vector<JointState> joints;
  joints.reserve(static_cast<std::size_t>(array.rows()));
  for (Eigen::Index k = 0; k < array.rows(); ++k) {
    JointState js;
    js.t = k;
    js.theta = array.row(k).transpose();
    joints.push_back(js);
  }
  return joints;
}

Matrix emg_to_array(const std::vector<EmgRecord>& records) {
  if (records.empty()) return Matrix(0, 0);
  Matrix array(static_cast<Eigen::Index>(records.size()),
               records.front().channels.size());
  for (std::size_t k = 0; k < records.size(); ++k)
    array.row(static_cast<Eigen::Index>(k)) = records[k].channels.transpose();
  return array;
}

Matrix joints_to_array(const std::vector<JointState>& joints) {
  Matrix array(static_cast<Eigen::Index>(joints.size()), kNumDofs);
  for (std::size_t k = 0; k < joints.size(); ++k)
    array.row(static_cast<Eigen::Index>(k)) = joints[k].theta.transpose();
  return array;
}

Session session_from_arrays(const Matrix& emg, const Matrix& joints) {
  if (emg.rows() != joints.rows())
    throw std::invalid_argument("emg and joints must have equal row counts");
  return Session{emg_from_array(emg), joints_from_array(joints)};
}

std::optional<Eigen::Vector3d> rest_from_optional(
    const std::optional<Matrix>& rest) {
  if (!rest) return std::nullopt;
  if (rest->size() != kNumDofs)
    throw std::invalid_argument("rest override must have 3 entries");
  Eigen::Vector3d v;
  for (int i = 0; i < kNumDofs; ++i) v[i] = (*rest)(i);
  return v;
}

py::dict report_to_dict(const EvalReport& report) {
  py::dict d;
  auto opt = [](const std::optional<double>& v) -> py::object {
    return v ? py::cast(*v) : py::none();
  };
  d["accuracy"] = report.accuracy;
  d["accuracy_steady"] = opt(report.accuracy_steady);
  d["accuracy_transient"] = opt(report.accuracy_transient);
  d["stability"] = report.stability;
  d["stability_steady"] = opt(report.stability_steady);
  d["stability_transient"] = opt(report.stability_transient);
  d["switches_pred"] = report.switches_pred;
  d["switches_truth"] = report.switches_truth;
  d["n"] = report.n;
  return d;
}

std::vector<StateTag> tags_from_mask(const std::vector<bool>& transient) {
  std::vector<StateTag> tags;
  tags.reserve(transient.size());
  for (const bool t : transient)
    tags.push_back(t ? StateTag::kTransient : StateTag::kSteady);
  return tags;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temporal convolution pipeline for simultaneous movement "
            "classification: synthesis, features, labels, models, metrics.";

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("window_len", &ExperimentConfig::window_len)
      .def_readwrite("step", &ExperimentConfig::step)
      .def_readwrite("sequence_len", &ExperimentConfig::sequence_len)
      .def_readwrite("feature_eps", &ExperimentConfig::feature_eps)
      .def_readwrite("v_thresh", &ExperimentConfig::v_thresh)
      .def_readwrite("train_fraction", &ExperimentConfig::train_fraction)
      .def_readwrite("filters", &ExperimentConfig::filters)
      .def_readwrite("taps", &ExperimentConfig::taps)
      .def_readwrite("epochs", &ExperimentConfig::epochs)
      .def_readwrite("learning_rate", &ExperimentConfig::learning_rate)
      .def_readwrite("batch_size", &ExperimentConfig::batch_size)
      .def_readwrite("final_column_loss",
                     &ExperimentConfig::final_column_loss)
      .def_readwrite("knn_k", &ExperimentConfig::knn_k)
      .def_readwrite("duration_s", &ExperimentConfig::duration_s)
      .def_readwrite("hold_min_s", &ExperimentConfig::hold_min_s)
      .def_readwrite("hold_max_s", &ExperimentConfig::hold_max_s)
      .def_readwrite("ramp_min_s", &ExperimentConfig::ramp_min_s)
      .def_readwrite("ramp_max_s", &ExperimentConfig::ramp_max_s)
      .def_readwrite("noise_floor", &ExperimentConfig::noise_floor)
      .def_readwrite("noise_gain", &ExperimentConfig::noise_gain)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_readwrite("sweep_windows", &ExperimentConfig::sweep_windows)
      .def_readwrite("sweep_seq_lens", &ExperimentConfig::sweep_seq_lens)
      .def_readwrite("sweep_epochs", &ExperimentConfig::sweep_epochs)
      .def_property(
          "tcn_features",
          [](const ExperimentConfig& c) {
            return std::string(feature_mode_name(c.tcn_feature_mode));
          },
          [](ExperimentConfig& c, const std::string& name) {
            c.tcn_feature_mode = parse_feature_mode(name);
          })
      .def_property(
          "baseline_features",
          [](const ExperimentConfig& c) {
            return std::string(feature_mode_name(c.baseline_feature_mode));
          },
          [](ExperimentConfig& c, const std::string& name) {
            c.baseline_feature_mode = parse_feature_mode(name);
          })
      .def_property(
          "optimizer",
          [](const ExperimentConfig& c) {
            return std::string(optimizer_name(c.optimizer));
          },
          [](ExperimentConfig& c, const std::string& name) {
            c.optimizer = parse_optimizer(name);
          });

  py::class_<ModelCheckpoint>(m, "Checkpoint")
      .def_readonly("kind", &ModelCheckpoint::kind)
      .def_property_readonly(
          "features",
          [](const ModelCheckpoint& cp) {
            return std::string(feature_mode_name(cp.feature_mode));
          })
      .def("save", [](const ModelCheckpoint& cp, const std::string& path) {
        save_checkpoint(cp, path);
      });

  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  m.def(
      "synth_session",
      [](const ExperimentConfig& config) {
        const SynthSession synth = synth_session(synth_config(config));
        py::dict d;
        d["emg"] = emg_to_array(synth.emg);
        d["joints"] = joints_to_array(synth.joints);
        d["segments"] = synth.script.size();
        return d;
      },
      py::arg("config"),
      "Deterministic synthetic session: EMG (n, channels) and joint "
      "trajectories (n, 3) for the configured duration and seed.");

  m.def(
      "extract_features",
      [](const Matrix& emg, int window_len, int step, const std::string& mode,
         double eps) {
        const auto stream = extract_stream(emg_from_array(emg), window_len,
                                           step, parse_feature_mode(mode), eps);
        return Matrix(feature_matrix(stream).transpose());
      },
      py::arg("emg"), py::arg("window_len") = 40, py::arg("step") = 5,
      py::arg("mode") = "mav", py::arg("eps") = 0.0,
      "Sliding-window features, one row per time-step.");

  m.def(
      "calibrate",
      [](const Matrix& joints, const std::optional<Matrix>& rest) {
        const CalibrationProfile profile =
            calibrate(joints_from_array(joints), rest_from_optional(rest));
        py::dict d;
        d["theta_min"] = Vector(profile.theta_min);
        d["theta_max"] = Vector(profile.theta_max);
        d["theta_rest"] = Vector(profile.theta_rest);
        d["lo"] = Vector(profile.lo);
        d["hi"] = Vector(profile.hi);
        return d;
      },
      py::arg("joints"), py::arg("rest") = py::none(),
      "Per-DOF range calibration with halfway thresholds.");

  m.def(
      "label_stream",
      [](const Matrix& joints, int window_len, int step, double v_thresh,
         const std::optional<Matrix>& rest) {
        const auto states = joints_from_array(joints);
        const CalibrationProfile profile =
            calibrate(states, rest_from_optional(rest));
        const auto labels = label_stream(states, profile, step, window_len);
        const auto tags = tag_states(states, v_thresh, step, window_len);
        std::vector<bool> transient;
        transient.reserve(tags.size());
        for (const StateTag tag : tags)
          transient.push_back(tag == StateTag::kTransient);
        return py::make_tuple(labels, transient);
      },
      py::arg("joints"), py::arg("window_len") = 40, py::arg("step") = 5,
      py::arg("v_thresh") = 0.1, py::arg("rest") = py::none(),
      "Window-end class labels and per-step transient flags.");

  m.def("pack_class", [](int e1, int e2, int e3) {
    TernaryEncoding enc;
    enc.e = {e1, e2, e3};
    return pack_class(enc);
  });
  m.def("unpack_class", [](int c) {
    const TernaryEncoding enc = unpack_class(c);
    return py::make_tuple(enc.e[0], enc.e[1], enc.e[2]);
  });

  m.def(
      "train",
      [](const Matrix& emg, const Matrix& joints,
         const ExperimentConfig& config, const std::string& kind) {
        return train_checkpoint(session_from_arrays(emg, joints), config,
                                kind);
      },
      py::arg("emg"), py::arg("joints"), py::arg("config"),
      py::arg("kind") = "tcn",
      "Train a model of the given kind ('tcn', 'knn', 'mlp') on the "
      "chronological train half of the session.");

  m.def(
      "evaluate",
      [](const Matrix& emg, const Matrix& joints,
         const ExperimentConfig& config, const ModelCheckpoint& cp) {
        const ModelEval eval =
            evaluate_checkpoint(session_from_arrays(emg, joints), config, cp);
        py::dict d = report_to_dict(eval.report);
        d["kind"] = eval.kind;
        std::vector<std::int64_t> t;
        std::vector<int> truth, pred;
        std::vector<bool> transient, correct;
        for (const TraceRow& row : eval.trace) {
          t.push_back(row.t);
          truth.push_back(row.truth);
          pred.push_back(row.pred);
          transient.push_back(row.state == StateTag::kTransient);
          correct.push_back(row.correct);
        }
        py::dict trace;
        trace["t"] = t;
        trace["truth"] = truth;
        trace["pred"] = pred;
        trace["transient"] = transient;
        trace["correct"] = correct;
        d["trace"] = trace;
        return d;
      },
      py::arg("emg"), py::arg("joints"), py::arg("config"),
      py::arg("checkpoint"),
      "Test-half evaluation: accuracy/stability report plus the per-step "
      "trace.");

  m.def("accuracy", &accuracy, py::arg("pred"), py::arg("truth"));
  m.def("stability", &stability, py::arg("pred"), py::arg("truth"),
        "1 - |switch-count difference| / (N - 1).");
  m.def(
      "segment_report",
      [](const std::vector<int>& pred, const std::vector<int>& truth,
         const std::vector<bool>& transient) {
        return report_to_dict(
            segment_report(pred, truth, tags_from_mask(transient)));
      },
      py::arg("pred"), py::arg("truth"), py::arg("transient"),
      "Accuracy and stability, overall and split by steady/transient.");

  m.def(
      "anova_oneway",
      [](const std::vector<std::vector<double>>& groups) {
        const AnovaResult r = anova_oneway(groups);
        py::dict d;
        d["f"] = r.f;
        d["p_value"] = r.p_value;
        d["df_between"] = r.df_between;
        d["df_within"] = r.df_within;
        return d;
      },
      py::arg("groups"), "Classical one-way ANOVA over >= 2 groups.");
  m.def("f_survival", &f_survival, py::arg("f"), py::arg("df1"),
        py::arg("df2"), "P(X > f) for X ~ F(df1, df2).");
}
