#pragma once

#include <string>
#include <utility>
#include <vector>

#include "emgtcn/baselines.hpp"
#include "emgtcn/signal.hpp"
#include "emgtcn/tcn.hpp"

namespace emgtcn {

// Self-describing model container: a kind tag, the feature-pipeline settings
// the model was trained with, the training config, and named tensors written
// row by row. The text form stores doubles as hex floats, so a save/load
// round trip is bit-exact.
struct ModelCheckpoint {
  std::string kind;  // "tcn" | "knn" | "mlp"
  FeatureMode feature_mode = FeatureMode::kMav;
  int window_len = 40;
  int step = 5;
  int sequence_len = 60;
  int sample_rate = kDefaultSampleRate;
  int channels = kDefaultChannels;
  double feature_eps = 0.0;
  int knn_k = 3;
  TrainConfig train;
  std::vector<std::pair<std::string, Matrix>> tensors;
  std::vector<int> labels;  // k-NN training labels

  const Matrix& tensor(const std::string& name) const;
};

void save_checkpoint(const ModelCheckpoint& cp, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

// Model <-> checkpoint conversions. pack_* fills the kind and tensors;
// pipeline metadata stays with the caller. unpack_* validates the kind tag
// and the shape chain.
ModelCheckpoint pack_tcn(const TcnParams& params);
TcnParams unpack_tcn(const ModelCheckpoint& cp);

ModelCheckpoint pack_knn(const KnnModel& model);
KnnModel unpack_knn(const ModelCheckpoint& cp);

ModelCheckpoint pack_mlp(const MlpModel& model);
MlpModel unpack_mlp(const ModelCheckpoint& cp);

}  // namespace emgtcn
