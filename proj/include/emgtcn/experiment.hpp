#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emgtcn/checkpoint.hpp"
#include "emgtcn/csv_io.hpp"
#include "emgtcn/metrics.hpp"
#include "emgtcn/synth.hpp"
#include "emgtcn/tcn.hpp"

namespace emgtcn {

// Every experiment knob with its default. A config file is a flat list of
// `key = value` lines overriding these; an empty file runs the default
// protocol (6-minute session, 200 ms windows at 25 ms steps, T=60 TCN on
// MAV vs. k-NN/MLP on TD5, first half train / second half test).
struct ExperimentConfig {
  // File locations.
  std::string session_path = "session.csv";
  std::string script_path = "script.csv";
  std::string feature_path = "features.csv";
  std::string label_path = "labels.csv";
  std::string model_path = "model.ckpt";
  std::string report_path = "report.csv";
  std::string trace_path;  // empty: no per-step trace
  std::string sweep_path = "sweep.csv";

  // Windowing and labeling.
  int sample_rate = kDefaultSampleRate;
  int channels = kDefaultChannels;
  int window_len = 40;  // samples (200 ms)
  int step = 5;         // samples (25 ms)
  int sequence_len = 60;
  double feature_eps = 0.0;  // ZC/SSC deadzone
  double v_thresh = 0.1;     // transient threshold, fraction of max speed
  double train_fraction = 0.5;

  // Models.
  FeatureMode tcn_feature_mode = FeatureMode::kMav;
  FeatureMode baseline_feature_mode = FeatureMode::kTd5;
  int filters = 64;
  int taps = 25;
  int epochs = 35;
  double learning_rate = 1e-3;
  int batch_size = 32;
  Optimizer optimizer = Optimizer::kAdam;
  bool final_column_loss = false;
  int knn_k = 3;

  // Synthetic session.
  double duration_s = 360.0;
  double hold_min_s = 0.5;
  double hold_max_s = 5.0;
  double ramp_min_s = 0.2;
  double ramp_max_s = 0.6;
  double noise_floor = 3.0;
  double noise_gain = 0.5;

  // Master seed (drives synthesis and training); `seeds` lists the
  // replicate seeds used for cross-seed comparisons.
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds = {1};

  // Sweep grids and the reduced per-cell training budget.
  std::vector<int> sweep_windows = {20, 40};
  std::vector<int> sweep_seq_lens = {1, 15, 60};
  int sweep_epochs = 8;
};

// Applies one `key = value` override; unknown keys or unparsable values are
// errors.
void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

// Flat key = value file, `#` comments, blank lines ignored.
ExperimentConfig load_config(const std::string& path);

SynthConfig synth_config(const ExperimentConfig& config);
TrainConfig train_config(const ExperimentConfig& config);
FeatureMode model_feature_mode(const ExperimentConfig& config,
                               const std::string& kind);

// Chronological split at floor(n_samples * train_fraction). A feature step
// trains only when its window ends in the train half; test evaluation
// starts at the first step whose window lies entirely in the test half.
// Steps straddling the boundary belong to neither side.
struct StepSplit {
  std::int64_t split_sample = 0;
  int train_end = 0;   // steps [0, train_end) are train-eligible
  int test_begin = 0;  // steps [test_begin, n_steps) are test-eligible
};

StepSplit split_steps(std::int64_t n_samples, int n_steps, int window_len,
                      int step, double train_fraction);

// Features, labels, and state tags for a whole session, plus the split.
struct PreparedData {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  std::vector<StateTag> states;
  StepSplit split;
};

PreparedData prepare_data(const Session& session,
                          const ExperimentConfig& config, FeatureMode mode);

// Training sequences for steps [0, train_end): each ends at one step and is
// left-padded with zero columns (weight 0) where its receptive field
// precedes the stream.
std::vector<TrainSample> make_train_samples(const PreparedData& data,
                                            int sequence_len);

// Full train pipeline for one model kind ("tcn", "knn", "mlp"): features at
// the kind's mode, chronological split, fit, and a checkpoint carrying the
// pipeline settings.
ModelCheckpoint train_checkpoint(const Session& session,
                                 const ExperimentConfig& config,
                                 const std::string& kind);

// Test-half evaluation of a checkpoint. The predictor starts cold at the
// first test step (the TCN's warm-up columns are zero-padded, never drawn
// from the train half), so every model predicts the same steps.
struct ModelEval {
  std::string kind;
  FeatureMode feature_mode = FeatureMode::kMav;
  EvalReport report;
  std::vector<TraceRow> trace;
};

ModelEval evaluate_checkpoint(const Session& session,
                              const ExperimentConfig& config,
                              const ModelCheckpoint& cp);

}  // namespace emgtcn
