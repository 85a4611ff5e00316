#include "emgtcn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "emgtcn/optim.hpp"
#include "emgtcn/rng.hpp"

namespace emgtcn {

namespace {

constexpr int kHiddenUnits = 5;
constexpr int kHiddenLayers = 3;

// Neighbors sorted ascending by (distance, training index). Majority vote;
// a vote tie goes to the tied class whose nearest member appears first.
int vote(const std::vector<std::pair<double, int>>& neighbors,
         const std::vector<int>& labels) {
  std::vector<std::pair<int, int>> counts;  // class -> votes
  for (const auto& [dist, idx] : neighbors) {
    const int cls = labels[idx];
    auto it = std::find_if(counts.begin(), counts.end(),
                           [cls](const auto& c) { return c.first == cls; });
    if (it == counts.end())
      counts.emplace_back(cls, 1);
    else
      ++it->second;
  }
  int best_votes = 0;
  for (const auto& [cls, votes] : counts) best_votes = std::max(best_votes, votes);
  for (const auto& [dist, idx] : neighbors) {
    const int cls = labels[idx];
    const auto it = std::find_if(counts.begin(), counts.end(),
                                 [cls](const auto& c) { return c.first == cls; });
    if (it->second == best_votes) return cls;
  }
  return labels[neighbors.front().second];
}

// Keep the k smallest (distance, index) pairs in insertion order.
void consider(std::vector<std::pair<double, int>>& best, std::size_t k,
              double dist, int idx) {
  const std::pair<double, int> cand{dist, idx};
  if (best.size() < k) {
    best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
  } else if (cand < best.back()) {
    best.pop_back();
    best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
  }
}

int softmax_argmax(Vector& logits) {
  const double mx = logits.maxCoeff();
  logits = (logits.array() - mx).exp();
  logits /= logits.sum();
  int best = 0;
  for (Eigen::Index i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace

KnnModel knn_fit(const Matrix& train_x, const std::vector<int>& labels, int k) {
  if (train_x.cols() == 0) throw std::invalid_argument("knn_fit: empty training set");
  if (static_cast<Eigen::Index>(labels.size()) != train_x.cols())
    throw std::invalid_argument("knn_fit: one label per training column required");
  if (k < 1 || k > train_x.cols())
    throw std::invalid_argument("knn_fit: k must be in [1, N]");
  return KnnModel{train_x, labels, k};
}

int knn_predict(const KnnModel& model, const Vector& x) {
  if (model.train_x.cols() == 0) throw std::invalid_argument("knn_predict: empty training set");
  if (x.size() != model.train_x.rows())
    throw std::invalid_argument("knn_predict: query dimension mismatch");
  std::vector<std::pair<double, int>> best;
  best.reserve(model.k + 1);
  for (Eigen::Index i = 0; i < model.train_x.cols(); ++i) {
    const double d2 = (model.train_x.col(i) - x).squaredNorm();
    consider(best, model.k, d2, static_cast<int>(i));
  }
  return vote(best, model.labels);
}

std::vector<int> knn_predict_batch(const KnnModel& model, const Matrix& queries) {
  if (queries.rows() != model.train_x.rows())
    throw std::invalid_argument("knn_predict_batch: query dimension mismatch");
  const auto n_train = model.train_x.cols();
  const auto n_query = queries.cols();
  std::vector<int> out(n_query);

  const Vector train_sq = model.train_x.colwise().squaredNorm().transpose();
  constexpr Eigen::Index kBlock = 256;
  Matrix dots;
  for (Eigen::Index q0 = 0; q0 < n_query; q0 += kBlock) {
    const auto block = std::min(kBlock, n_query - q0);
    dots.noalias() = model.train_x.transpose() * queries.middleCols(q0, block);
    for (Eigen::Index j = 0; j < block; ++j) {
      const double q_sq = queries.col(q0 + j).squaredNorm();
      std::vector<std::pair<double, int>> best;
      best.reserve(model.k + 1);
      for (Eigen::Index i = 0; i < n_train; ++i) {
        const double d2 = train_sq[i] + q_sq - 2.0 * dots(i, j);
        consider(best, model.k, d2, static_cast<int>(i));
      }
      out[q0 + j] = vote(best, model.labels);
    }
  }
  return out;
}

MlpModel mlp_init(int input_dim, int classes, std::uint64_t seed) {
  if (input_dim < 1 || classes < 2) throw std::invalid_argument("mlp_init: bad dimensions");
  Rng rng(seed);
  std::vector<int> dims{input_dim};
  for (int l = 0; l < kHiddenLayers; ++l) dims.push_back(kHiddenUnits);
  dims.push_back(classes);

  MlpModel model;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-limit, limit);
    model.w.push_back(std::move(w));
    model.b.push_back(Vector::Zero(fan_out));
  }
  return model;
}

Vector mlp_forward(const MlpModel& model, const Vector& x) {
  Vector h = x;
  for (std::size_t l = 0; l + 1 < model.w.size(); ++l)
    h = ((model.w[l] * h + model.b[l]).array().max(0.0)).matrix();
  Vector logits = model.w.back() * h + model.b.back();
  const double mx = logits.maxCoeff();
  logits = (logits.array() - mx).exp();
  return logits / logits.sum();
}

MlpGradients mlp_backward(const MlpModel& model, const Vector& x, int label) {
  if (label < 0 || label >= model.classes())
    throw std::invalid_argument("mlp_backward: label outside [0, C)");
  const auto layers = model.w.size();
  std::vector<Vector> activations{x};  // input + post-ReLU hidden outputs
  for (std::size_t l = 0; l + 1 < layers; ++l)
    activations.push_back(
        ((model.w[l] * activations.back() + model.b[l]).array().max(0.0)).matrix());

  Vector delta = model.w.back() * activations.back() + model.b.back();
  softmax_argmax(delta);  // delta now holds the class probabilities
  delta[label] -= 1.0;

  MlpGradients g;
  g.w.resize(layers);
  g.b.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    g.w[l] = delta * activations[l].transpose();
    g.b[l] = delta;
    if (l > 0) {
      delta = model.w[l].transpose() * delta;
      delta = (activations[l].array() > 0.0).select(delta, 0.0);
    }
  }
  return g;
}

MlpModel mlp_train(const Matrix& x, const std::vector<int>& labels, int classes,
                   const TrainConfig& config) {
  if (x.cols() == 0) throw std::invalid_argument("mlp_train: empty dataset");
  if (static_cast<Eigen::Index>(labels.size()) != x.cols())
    throw std::invalid_argument("mlp_train: one label per column required");
  if (config.epochs < 0) throw std::invalid_argument("mlp_train: epochs must be >= 0");
  for (int y : labels)
    if (y < 0 || y >= classes) throw std::invalid_argument("mlp_train: label outside [0, C)");

  // Standardize features so raw scale differences (e.g. variance vs. zero
  // crossings) do not dominate the loss surface. The affine transform is
  // folded into layer 0 before returning, keeping the model format unchanged.
  Vector mean = x.rowwise().mean();
  Vector sigma(x.rows());
  for (Eigen::Index f = 0; f < x.rows(); ++f) {
    const double var = (x.row(f).array() - mean[f]).square().mean();
    const double sd = std::sqrt(var);
    sigma[f] = sd > 0.0 ? sd : 1.0;
  }
  const Matrix xs = sigma.cwiseInverse().asDiagonal() * (x.colwise() - mean);

  MlpModel model = mlp_init(static_cast<int>(x.rows()), classes,
                            derive_seed(config.seed, 0));
  Rng shuffle_rng(derive_seed(config.seed, 1));
  const auto layers = model.w.size();

  std::vector<AdamMoments<Matrix>> adam_w;
  std::vector<AdamMoments<Vector>> adam_b;
  for (std::size_t l = 0; l < layers; ++l) {
    adam_w.emplace_back(model.w[l]);
    adam_b.emplace_back(model.b[l]);
  }
  std::int64_t steps = 0;

  const auto n = static_cast<std::int64_t>(x.cols());
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::int64_t start = 0; start < n; start += config.batch_size) {
      const auto batch = std::min<std::int64_t>(config.batch_size, n - start);

      std::vector<Matrix> acts(layers + 1);
      acts[0].resize(x.rows(), batch);
      for (std::int64_t k = 0; k < batch; ++k) acts[0].col(k) = xs.col(order[start + k]);
      for (std::size_t l = 0; l + 1 < layers; ++l) {
        acts[l + 1] = model.w[l] * acts[l];
        acts[l + 1].colwise() += model.b[l];
        acts[l + 1] = acts[l + 1].cwiseMax(0.0);
      }
      Matrix delta = model.w.back() * acts[layers - 1];
      delta.colwise() += model.b.back();

      double batch_loss = 0.0;
      for (std::int64_t k = 0; k < batch; ++k) {
        auto col = delta.col(k);
        const double mx = col.maxCoeff();
        col = (col.array() - mx).exp();
        col /= col.sum();
        batch_loss += -std::log(col[labels[order[start + k]]]);
        col[labels[order[start + k]]] -= 1.0;
        col /= static_cast<double>(batch);
      }
      if (!std::isfinite(batch_loss))
        throw std::runtime_error(
            "mlp_train: non-finite loss at epoch " + std::to_string(epoch) +
            " (learning rate too high?)");

      ++steps;
      for (std::size_t l = layers; l-- > 0;) {
        const Matrix gw = delta * acts[l].transpose();
        const Vector gb = delta.rowwise().sum();
        if (l > 0) {
          delta = model.w[l].transpose() * delta;
          delta = (acts[l].array() > 0.0).select(delta, 0.0);
        }
        if (config.optimizer == Optimizer::kAdam) {
          adam_step(model.w[l], adam_w[l], gw, config.learning_rate, steps);
          adam_step(model.b[l], adam_b[l], gb, config.learning_rate, steps);
        } else {
          model.w[l] -= config.learning_rate * gw;
          model.b[l] -= config.learning_rate * gb;
        }
      }
    }
  }

  model.w[0] = model.w[0] * sigma.cwiseInverse().asDiagonal();
  model.b[0] -= model.w[0] * mean;
  return model;
}

int mlp_predict(const MlpModel& model, const Vector& x) {
  Vector logits = x;
  for (std::size_t l = 0; l + 1 < model.w.size(); ++l)
    logits = ((model.w[l] * logits + model.b[l]).array().max(0.0)).matrix();
  logits = model.w.back() * logits + model.b.back();
  return softmax_argmax(logits);
}

std::vector<int> mlp_predict_batch(const MlpModel& model, const Matrix& queries) {
  std::vector<int> out(queries.cols());
  for (Eigen::Index j = 0; j < queries.cols(); ++j) out[j] = mlp_predict(model, queries.col(j));
  return out;
}

}  // namespace emgtcn
