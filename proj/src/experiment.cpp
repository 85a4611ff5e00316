#include "emgtcn/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "emgtcn/baselines.hpp"

namespace emgtcn {
namespace {

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return "";
  }
  std::size_t last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for key '" +
                              key + "'");
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    bad_value(key, value);
  }
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    bad_value(key, value);
  }
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    bad_value(key, value);
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") {
    return true;
  }
  if (value == "0" || value == "false" || value == "no") {
    return false;
  }
  bad_value(key, value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::size_t stop =
        comma == std::string::npos ? value.size() : comma;
    const std::string item = trim(value.substr(start, stop - start));
    if (!item.empty()) {
      items.push_back(item);
    }
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return items;
}

std::vector<int> to_int_list(const std::string& key,
                             const std::string& value) {
  std::vector<int> out;
  for (const std::string& item : split_list(value)) {
    out.push_back(to_int(key, item));
  }
  if (out.empty()) {
    bad_value(key, value);
  }
  return out;
}

std::vector<std::uint64_t> to_u64_list(const std::string& key,
                                       const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_list(value)) {
    out.push_back(to_u64(key, item));
  }
  if (out.empty()) {
    bad_value(key, value);
  }
  return out;
}

Matrix step_feature_matrix(const std::vector<FeatureVector>& features,
                           int begin, int end) {
  const Eigen::Index dim = features.empty() ? 0 : features[0].values.size();
  Matrix m(dim, end - begin);
  for (int t = begin; t < end; ++t) {
    m.col(t - begin) = features[static_cast<std::size_t>(t)].values;
  }
  return m;
}

std::vector<int> slice(const std::vector<int>& v, int begin, int end) {
  return std::vector<int>(v.begin() + begin, v.begin() + end);
}

}  // namespace

void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
  if (key == "session_path") {
    config.session_path = value;
  } else if (key == "script_path") {
    config.script_path = value;
  } else if (key == "feature_path") {
    config.feature_path = value;
  } else if (key == "label_path") {
    config.label_path = value;
  } else if (key == "model_path") {
    config.model_path = value;
  } else if (key == "report_path") {
    config.report_path = value;
  } else if (key == "trace_path") {
    config.trace_path = value;
  } else if (key == "sweep_path") {
    config.sweep_path = value;
  } else if (key == "sample_rate") {
    config.sample_rate = to_int(key, value);
  } else if (key == "channels") {
    config.channels = to_int(key, value);
  } else if (key == "window_len") {
    config.window_len = to_int(key, value);
  } else if (key == "step") {
    config.step = to_int(key, value);
  } else if (key == "sequence_len") {
    config.sequence_len = to_int(key, value);
  } else if (key == "feature_eps") {
    config.feature_eps = to_double(key, value);
  } else if (key == "v_thresh") {
    config.v_thresh = to_double(key, value);
  } else if (key == "train_fraction") {
    config.train_fraction = to_double(key, value);
  } else if (key == "tcn_feature_mode") {
    config.tcn_feature_mode = parse_feature_mode(value);
  } else if (key == "baseline_feature_mode") {
    config.baseline_feature_mode = parse_feature_mode(value);
  } else if (key == "filters") {
    config.filters = to_int(key, value);
  } else if (key == "taps") {
    config.taps = to_int(key, value);
  } else if (key == "epochs") {
    config.epochs = to_int(key, value);
  } else if (key == "learning_rate") {
    config.learning_rate = to_double(key, value);
  } else if (key == "batch_size") {
    config.batch_size = to_int(key, value);
  } else if (key == "optimizer") {
    config.optimizer = parse_optimizer(value);
  } else if (key == "final_column_loss") {
    config.final_column_loss = to_bool(key, value);
  } else if (key == "knn_k") {
    config.knn_k = to_int(key, value);
  } else if (key == "duration_s") {
    config.duration_s = to_double(key, value);
  } else if (key == "hold_min_s") {
    config.hold_min_s = to_double(key, value);
  } else if (key == "hold_max_s") {
    config.hold_max_s = to_double(key, value);
  } else if (key == "ramp_min_s") {
    config.ramp_min_s = to_double(key, value);
  } else if (key == "ramp_max_s") {
    config.ramp_max_s = to_double(key, value);
  } else if (key == "noise_floor") {
    config.noise_floor = to_double(key, value);
  } else if (key == "noise_gain") {
    config.noise_gain = to_double(key, value);
  } else if (key == "seed") {
    config.seed = to_u64(key, value);
  } else if (key == "seeds") {
    config.seeds = to_u64_list(key, value);
  } else if (key == "sweep_windows") {
    config.sweep_windows = to_int_list(key, value);
  } else if (key == "sweep_seq_lens") {
    config.sweep_seq_lens = to_int_list(key, value);
  } else if (key == "sweep_epochs") {
    config.sweep_epochs = to_int(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open '" + path + "'");
  }
  ExperimentConfig config;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    const std::string text = trim(line);
    if (text.empty()) {
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: '" + path + "' line " +
                                  std::to_string(line_no) +
                                  " is not key = value");
    }
    set_config_value(config, trim(text.substr(0, eq)),
                     trim(text.substr(eq + 1)));
  }
  return config;
}

SynthConfig synth_config(const ExperimentConfig& config) {
  SynthConfig sc;
  sc.duration_s = config.duration_s;
  sc.sample_rate = config.sample_rate;
  sc.channels = config.channels;
  sc.hold_min_s = config.hold_min_s;
  sc.hold_max_s = config.hold_max_s;
  sc.ramp_min_s = config.ramp_min_s;
  sc.ramp_max_s = config.ramp_max_s;
  sc.noise_floor = config.noise_floor;
  sc.noise_gain = config.noise_gain;
  sc.seed = config.seed;
  return sc;
}

TrainConfig train_config(const ExperimentConfig& config) {
  TrainConfig tc;
  tc.epochs = config.epochs;
  tc.learning_rate = config.learning_rate;
  tc.batch_size = config.batch_size;
  tc.seed = config.seed;
  tc.optimizer = config.optimizer;
  tc.final_column_loss = config.final_column_loss;
  return tc;
}

FeatureMode model_feature_mode(const ExperimentConfig& config,
                               const std::string& kind) {
  if (kind == "tcn") {
    return config.tcn_feature_mode;
  }
  if (kind == "knn" || kind == "mlp") {
    return config.baseline_feature_mode;
  }
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

StepSplit split_steps(std::int64_t n_samples, int n_steps, int window_len,
                      int step, double train_fraction) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw std::invalid_argument("split: train fraction must be in (0, 1)");
  }
  if (window_len < 1 || step < 1 || n_samples < 0 || n_steps < 0) {
    throw std::invalid_argument("split: bad windowing parameters");
  }
  StepSplit split;
  split.split_sample = static_cast<std::int64_t>(
      std::floor(static_cast<double>(n_samples) * train_fraction));
  // Last train step: window [t*step, t*step + window_len) inside the train
  // half. Guard the short-split case explicitly: truncating division would
  // round the negative numerator toward zero and admit a crossing window.
  const std::int64_t last_train =
      split.split_sample >= window_len
          ? (split.split_sample - window_len) / step
          : -1;
  split.train_end = static_cast<int>(
      std::min<std::int64_t>(std::max<std::int64_t>(last_train + 1, 0),
                             n_steps));
  // First test step: window start at or past the boundary.
  const std::int64_t first_test = (split.split_sample + step - 1) / step;
  split.test_begin =
      static_cast<int>(std::min<std::int64_t>(first_test, n_steps));
  return split;
}

PreparedData prepare_data(const Session& session,
                          const ExperimentConfig& config, FeatureMode mode) {
  if (session.emg.size() != session.joints.size()) {
    throw std::invalid_argument(
        "session: EMG and joint streams differ in length");
  }
  PreparedData data;
  data.features = extract_stream(session.emg, config.window_len, config.step,
                                 mode, config.feature_eps);
  const CalibrationProfile profile = calibrate(session.joints);
  data.labels = label_stream(session.joints, profile, config.step,
                             config.window_len);
  data.states = tag_states(session.joints, config.v_thresh, config.step,
                           config.window_len);
  if (data.labels.size() != data.features.size() ||
      data.states.size() != data.features.size()) {
    throw std::logic_error("pipeline: stream lengths diverge");
  }
  data.split = split_steps(static_cast<std::int64_t>(session.emg.size()),
                           static_cast<int>(data.features.size()),
                           config.window_len, config.step,
                           config.train_fraction);
  return data;
}

std::vector<TrainSample> make_train_samples(const PreparedData& data,
                                            int sequence_len) {
  if (sequence_len < 1) {
    throw std::invalid_argument("train: sequence length must be positive");
  }
  const Eigen::Index dim =
      data.features.empty() ? 0 : data.features[0].values.size();
  std::vector<TrainSample> samples;
  samples.reserve(static_cast<std::size_t>(data.split.train_end));
  for (int t = 0; t < data.split.train_end; ++t) {
    TrainSample sample;
    sample.x = Matrix::Zero(dim, sequence_len);
    sample.labels.assign(static_cast<std::size_t>(sequence_len), 0);
    sample.mask.assign(static_cast<std::size_t>(sequence_len), 0.0);
    for (int col = 0; col < sequence_len; ++col) {
      const int s = t - sequence_len + 1 + col;
      if (s < 0) {
        continue;  // warm-up: zero column, weight 0
      }
      sample.x.col(col) = data.features[static_cast<std::size_t>(s)].values;
      sample.labels[static_cast<std::size_t>(col)] =
          data.labels[static_cast<std::size_t>(s)];
      sample.mask[static_cast<std::size_t>(col)] = 1.0;
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

ModelCheckpoint train_checkpoint(const Session& session,
                                 const ExperimentConfig& config,
                                 const std::string& kind) {
  const FeatureMode mode = model_feature_mode(config, kind);
  const PreparedData data = prepare_data(session, config, mode);
  if (data.split.train_end < 1) {
    throw std::runtime_error("train: no usable training steps before the "
                             "split boundary");
  }
  const int channels = static_cast<int>(session.emg.front().channels.size());

  ModelCheckpoint cp;
  if (kind == "tcn") {
    const TcnHyper hyper{config.filters, config.taps,
                         feature_dim(mode, channels), kNumClasses};
    cp = pack_tcn(
        tcn_train(make_train_samples(data, config.sequence_len), hyper,
                  train_config(config)));
  } else if (kind == "knn") {
    cp = pack_knn(knn_fit(
        step_feature_matrix(data.features, 0, data.split.train_end),
        slice(data.labels, 0, data.split.train_end), config.knn_k));
  } else if (kind == "mlp") {
    cp = pack_mlp(mlp_train(
        step_feature_matrix(data.features, 0, data.split.train_end),
        slice(data.labels, 0, data.split.train_end), kNumClasses,
        train_config(config)));
  } else {
    throw std::invalid_argument("unknown model kind '" + kind + "'");
  }
  cp.feature_mode = mode;
  cp.window_len = config.window_len;
  cp.step = config.step;
  cp.sequence_len = config.sequence_len;
  cp.sample_rate = config.sample_rate;
  cp.channels = channels;
  cp.feature_eps = config.feature_eps;
  cp.knn_k = config.knn_k;
  cp.train = train_config(config);
  return cp;
}

ModelEval evaluate_checkpoint(const Session& session,
                              const ExperimentConfig& config,
                              const ModelCheckpoint& cp) {
  const FeatureMode requested = model_feature_mode(config, cp.kind);
  if (requested != cp.feature_mode) {
    throw std::runtime_error(
        std::string("eval: checkpoint was trained with ") +
        feature_mode_name(cp.feature_mode) + " features but " +
        feature_mode_name(requested) + " was requested");
  }
  if (!session.emg.empty() &&
      session.emg.front().channels.size() != cp.channels) {
    throw std::runtime_error("eval: session channel count does not match "
                             "the checkpoint");
  }
  // The checkpoint owns the input contract; evaluate with its windowing.
  ExperimentConfig pipeline = config;
  pipeline.window_len = cp.window_len;
  pipeline.step = cp.step;
  pipeline.sequence_len = cp.sequence_len;
  pipeline.feature_eps = cp.feature_eps;
  const PreparedData data = prepare_data(session, pipeline, cp.feature_mode);

  const int n_steps = static_cast<int>(data.features.size());
  const int begin = data.split.test_begin;
  if (begin >= n_steps) {
    throw std::runtime_error("eval: no test steps after the split boundary");
  }
  const Matrix queries = step_feature_matrix(data.features, begin, n_steps);

  std::vector<int> preds;
  if (cp.kind == "tcn") {
    preds = tcn_predict_matrix(unpack_tcn(cp), queries, cp.sequence_len);
  } else if (cp.kind == "knn") {
    preds = knn_predict_batch(unpack_knn(cp), queries);
  } else if (cp.kind == "mlp") {
    preds = mlp_predict_batch(unpack_mlp(cp), queries);
  } else {
    throw std::invalid_argument("unknown model kind '" + cp.kind + "'");
  }

  const std::vector<int> truth = slice(data.labels, begin, n_steps);
  const std::vector<StateTag> states(data.states.begin() + begin,
                                     data.states.end());
  ModelEval eval;
  eval.kind = cp.kind;
  eval.feature_mode = cp.feature_mode;
  eval.report = segment_report(preds, truth, states);
  eval.trace.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    TraceRow row;
    row.t = begin + static_cast<std::int64_t>(i);
    row.truth = truth[i];
    row.pred = preds[i];
    row.state = states[i];
    row.correct = preds[i] == truth[i];
    eval.trace.push_back(row);
  }
  return eval;
}

}  // namespace emgtcn
