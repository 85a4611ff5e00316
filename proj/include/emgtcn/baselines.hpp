#pragma once

#include <cstdint>
#include <vector>

#include "emgtcn/tcn.hpp"
#include "emgtcn/types.hpp"

namespace emgtcn {

// k-nearest-neighbors over single feature vectors, Euclidean distance.
// Training points are stored as columns.
struct KnnModel {
  Matrix train_x;           // F_feat x N
  std::vector<int> labels;  // N
  int k = 3;
};

KnnModel knn_fit(const Matrix& train_x, const std::vector<int>& labels, int k);

// Majority vote among the k nearest training points. Distance ties resolve
// by training-set order; vote ties go to the tied class whose nearest
// member is closest.
int knn_predict(const KnnModel& model, const Vector& x);

// Column-per-query batch prediction (same results as knn_predict).
std::vector<int> knn_predict_batch(const KnnModel& model, const Matrix& queries);

// Fully-connected softmax classifier with three hidden ReLU layers of five
// units each.
struct MlpModel {
  std::vector<Matrix> w;  // per layer, fan_out x fan_in
  std::vector<Vector> b;
  int classes() const { return static_cast<int>(b.back().size()); }
};

MlpModel mlp_init(int input_dim, int classes, std::uint64_t seed);

// Class probabilities for one input (softmax output layer).
Vector mlp_forward(const MlpModel& model, const Vector& x);

struct MlpGradients {
  std::vector<Matrix> w;
  std::vector<Vector> b;
};

// Analytic cross-entropy gradients for a single example.
MlpGradients mlp_backward(const MlpModel& model, const Vector& x, int label);

// Mini-batch cross-entropy training; shares the optimizer and determinism
// contract of tcn_train. Inputs are columns of x. Features are standardized
// (per-row z-score over the training set) before optimization; the affine
// transform is folded into the first layer of the returned model, so callers
// feed raw features to mlp_forward / mlp_predict as usual.
MlpModel mlp_train(const Matrix& x, const std::vector<int>& labels, int classes,
                   const TrainConfig& config);

int mlp_predict(const MlpModel& model, const Vector& x);
std::vector<int> mlp_predict_batch(const MlpModel& model, const Matrix& queries);

}  // namespace emgtcn
