#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "emgtcn/labeling.hpp"

namespace emgtcn {

// Time-aligned class predictions starting at feature step t0.
struct PredictionStream {
  std::int64_t t0 = 0;
  std::vector<int> classes;
};

// Accuracy and stability, overall and split by steady/transient state.
// Per-state fields are absent when that state never occurs (accuracy) or
// has no contiguous run of at least two steps (stability).
struct EvalReport {
  double accuracy = 0.0;
  std::optional<double> accuracy_steady;
  std::optional<double> accuracy_transient;
  double stability = 0.0;
  std::optional<double> stability_steady;
  std::optional<double> stability_transient;
  std::int64_t switches_pred = 0;
  std::int64_t switches_truth = 0;
  std::int64_t n = 0;
};

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

// Accuracy over the steps tagged with `state`; empty selection is an error.
double masked_accuracy(const std::vector<int>& pred,
                       const std::vector<int>& truth,
                       const std::vector<StateTag>& tags, StateTag state);

// Number of consecutive-step class changes in a stream of >= 2 predictions.
std::int64_t switch_count(const std::vector<int>& stream);

// S = 1 - |c_pred - c_truth| / (N - 1), in [0, 1]. S = 1 means the
// prediction switches exactly as often as ground truth, regardless of
// whether the classes agree.
double stability(const std::vector<int>& pred, const std::vector<int>& truth);

// Per-state stability is computed on each maximal contiguous run of that
// state with >= 2 steps and averaged weighted by run length.
EvalReport segment_report(const std::vector<int>& pred,
                          const std::vector<int>& truth,
                          const std::vector<StateTag>& tags);

}  // namespace emgtcn
