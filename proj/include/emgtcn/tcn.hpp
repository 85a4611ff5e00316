#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emgtcn/signal.hpp"
#include "emgtcn/metrics.hpp"
#include "emgtcn/types.hpp"

namespace emgtcn {

// Network dimensions: M convolutional filters of d taps over F input
// features, C output classes.
struct TcnHyper {
  int filters = 64;   // M
  int taps = 25;      // d
  int features = 8;   // F
  int classes = 27;   // C
};

// Learnable tensors. The filter bank is stored flattened as filters x
// (taps * features); entry (i, tap * F + f) is filter i, tap index `tap`
// (tap taps-1 aligns with the current time-step), input feature f.
struct TcnParams {
  TcnHyper hyper;
  Matrix w;  // filters x (taps * features)
  Vector b;  // filters
  Matrix u;  // classes x filters
  Vector c;  // classes

  double& w_at(int filter, int tap, int feature) {
    return w(filter, tap * hyper.features + feature);
  }
  double w_at(int filter, int tap, int feature) const {
    return w(filter, tap * hyper.features + feature);
  }
};

struct TcnGradients {
  Matrix w;
  Vector b;
  Matrix u;
  Vector c;
};

enum class Optimizer { kAdam, kSgd };

struct TrainConfig {
  int epochs = 35;
  double learning_rate = 1e-3;
  int batch_size = 32;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::kAdam;
  // Restrict the loss to the final (current-time) column instead of
  // averaging over every column of the sequence.
  bool final_column_loss = false;
};

const char* optimizer_name(Optimizer opt);
Optimizer parse_optimizer(const std::string& name);

// One training example: an F x T feature sequence, a label per column, and
// an optional per-column weight (empty mask = all ones). Warm-up columns
// that fall before the start of the stream carry weight 0.
struct TrainSample {
  FeatureSequence x;
  std::vector<int> labels;
  std::vector<double> mask;
};

// Glorot-uniform weights, zero biases, drawn from a seeded stream.
TcnParams tcn_init(const TcnHyper& hyper, std::uint64_t seed);

// Causal convolution + ReLU: output column t sums filter taps over input
// columns t-d+1 .. t with zero padding below column 0, so the map keeps the
// input's T columns.
Matrix conv_forward(const TcnParams& params, const FeatureSequence& x);

// Time-distributed softmax head over a feature map: column t of the result
// is softmax(U * E_t + c), computed with max subtraction.
Matrix head_forward(const TcnParams& params, const Matrix& feature_map);

struct TcnForward {
  Matrix feature_map;  // M x T, post-ReLU
  Matrix probs;        // C x T, columns sum to 1
};
TcnForward tcn_forward(const TcnParams& params, const FeatureSequence& x);

// Mean masked cross-entropy over the sequence columns.
double sequence_loss(const Matrix& probs, const std::vector<int>& labels,
                     const std::vector<double>& mask = {});

// Analytic gradients of sequence_loss(head(conv(x))) with respect to every
// parameter tensor. The ReLU subgradient at exactly 0 is 0.
TcnGradients tcn_backward(const TcnParams& params, const FeatureSequence& x,
                          const std::vector<int>& labels,
                          const std::vector<double>& mask = {});

// Mini-batch training with the configured optimizer. Deterministic for a
// fixed seed: initialization and shuffling use dedicated child streams.
// A non-finite loss aborts with a diagnostic.
TcnParams tcn_train(const std::vector<TrainSample>& data, const TcnHyper& hyper,
                    const TrainConfig& config);

// Mean loss of the current parameters over a dataset (no update).
double tcn_dataset_loss(const TcnParams& params, const std::vector<TrainSample>& data);

// One class prediction per feature time-step: the argmax (lowest index on
// ties) of the final-column output of the length-T zero-padded sequence
// ending at that step.
PredictionStream tcn_predict_stream(const TcnParams& params,
                                    const std::vector<FeatureVector>& features,
                                    int sequence_len);

// Same prediction rule applied to a pre-assembled K x L feature matrix.
std::vector<int> tcn_predict_matrix(const TcnParams& params,
                                    const Matrix& features, int sequence_len);

}  // namespace emgtcn
