#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "emgtcn/baselines.hpp"
#include "emgtcn/rng.hpp"

using namespace emgtcn;

namespace {

Matrix random_points(int dim, int n, Rng& rng) {
  Matrix m(dim, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.uniform(-1.0, 1.0);
  }
  return m;
}

// Exhaustive-scan k-NN with the documented tie rules: neighbors ordered by
// (distance, training index); majority vote; vote ties go to the tied class
// whose nearest member comes first in that order.
int knn_oracle(const KnnModel& model, const Vector& q) {
  std::vector<std::pair<double, int>> all;
  for (Eigen::Index i = 0; i < model.train_x.cols(); ++i) {
    all.emplace_back((model.train_x.col(i) - q).squaredNorm(),
                     static_cast<int>(i));
  }
  std::sort(all.begin(), all.end());
  const int k = std::min<int>(model.k, static_cast<int>(all.size()));
  std::vector<int> votes;
  for (int i = 0; i < k; ++i) {
    votes.push_back(model.labels[static_cast<std::size_t>(all[i].second)]);
  }
  int best = -1;
  int best_count = 0;
  for (int i = 0; i < k; ++i) {
    const int cls = votes[static_cast<std::size_t>(i)];
    const int count =
        static_cast<int>(std::count(votes.begin(), votes.end(), cls));
    // Walking neighbors nearest-first, the first class to reach the top
    // count is the tied class with the closest member.
    if (count > best_count) {
      best_count = count;
      best = cls;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("knn: exact match and simple majority") {
  Matrix x(2, 3);
  x << 0, 1, 5, 0, 1, 5;
  const KnnModel one = knn_fit(x, {7, 8, 9}, 1);
  CHECK(knn_predict(one, Vector(x.col(1))) == 8);
  const KnnModel three = knn_fit(x, {4, 4, 2}, 3);
  // Neighbor labels {4, 4, 2} -> majority 4.
  CHECK(knn_predict(three, Vector(x.col(0))) == 4);
}

TEST_CASE("knn: distance ties break by training order") {
  // Two training points mirrored around the query, equidistant.
  Matrix x(1, 2);
  x << -1, 1;
  const KnnModel model = knn_fit(x, {3, 5}, 1);
  CHECK(knn_predict(model, Vector::Zero(1)) == 3);
  // Swapping the storage order flips the winner.
  Matrix rx(1, 2);
  rx << 1, -1;
  const KnnModel swapped = knn_fit(rx, {5, 3}, 1);
  CHECK(knn_predict(swapped, Vector::Zero(1)) == 5);
}

TEST_CASE("knn: vote ties go to the closest tied class") {
  // k = 2: one vote each; class of the nearer neighbor wins.
  Matrix x(1, 2);
  x << 0.1, -0.3;
  const KnnModel model = knn_fit(x, {9, 4}, 2);
  CHECK(knn_predict(model, Vector::Zero(1)) == 9);
  CHECK(knn_predict(model, Vector::Constant(1, -0.25)) == 4);
}

TEST_CASE("knn matches the exhaustive-scan oracle") {
  Rng rng(71);
  const Matrix train = random_points(5, 50, rng);
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) {
    labels.push_back(static_cast<int>(rng.below(6)));
  }
  const KnnModel model = knn_fit(train, labels, 3);
  const Matrix queries = random_points(5, 100, rng);
  const std::vector<int> batch = knn_predict_batch(model, queries);
  REQUIRE(batch.size() == 100);
  for (int j = 0; j < 100; ++j) {
    const Vector q = queries.col(j);
    const int oracle = knn_oracle(model, q);
    CHECK(knn_predict(model, q) == oracle);
    CHECK(batch[static_cast<std::size_t>(j)] == oracle);
  }
}

TEST_CASE("knn: uniform feature rescaling never changes predictions") {
  Rng rng(72);
  const Matrix train = random_points(4, 30, rng);
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    labels.push_back(static_cast<int>(rng.below(4)));
  }
  const KnnModel model = knn_fit(train, labels, 3);
  const KnnModel scaled = knn_fit(3.0 * train, labels, 3);
  for (int j = 0; j < 50; ++j) {
    const Vector q = random_points(4, 1, rng).col(0);
    CHECK(knn_predict(model, q) == knn_predict(scaled, Vector(3.0 * q)));
  }
}

TEST_CASE("knn: permuting queries permutes predictions") {
  Rng rng(73);
  const Matrix train = random_points(3, 20, rng);
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  const KnnModel model = knn_fit(train, labels, 3);
  const Matrix queries = random_points(3, 15, rng);
  const auto forward = knn_predict_batch(model, queries);
  Matrix reversed(3, 15);
  for (int j = 0; j < 15; ++j) {
    reversed.col(j) = queries.col(14 - j);
  }
  const auto backward = knn_predict_batch(model, reversed);
  for (int j = 0; j < 15; ++j) {
    CHECK(forward[static_cast<std::size_t>(j)] ==
          backward[static_cast<std::size_t>(14 - j)]);
  }
}

TEST_CASE("knn_fit validates its inputs") {
  Matrix x(2, 3);
  x.setZero();
  CHECK_THROWS_AS(knn_fit(x, {1, 2, 3}, 0), std::invalid_argument);
  CHECK_THROWS_AS(knn_fit(x, {1, 2, 3}, 4), std::invalid_argument);  // k > N
  CHECK_THROWS_AS(knn_fit(x, {1, 2}, 2), std::invalid_argument);
  CHECK_THROWS_AS(knn_fit(Matrix(2, 0), {}, 1), std::invalid_argument);
}

TEST_CASE("mlp_init: architecture F -> 5 -> 5 -> 5 -> C") {
  const MlpModel model = mlp_init(40, 27, 5);
  REQUIRE(model.w.size() == 4);
  CHECK(model.w[0].rows() == 5);
  CHECK(model.w[0].cols() == 40);
  CHECK(model.w[1].rows() == 5);
  CHECK(model.w[1].cols() == 5);
  CHECK(model.w[2].rows() == 5);
  CHECK(model.w[2].cols() == 5);
  CHECK(model.w[3].rows() == 27);
  CHECK(model.w[3].cols() == 5);
  CHECK(model.classes() == 27);
  for (const Vector& b : model.b) {
    CHECK(b.isZero(0.0));
  }
  const MlpModel again = mlp_init(40, 27, 5);
  CHECK(model.w[0] == again.w[0]);
  const MlpModel other = mlp_init(40, 27, 6);
  CHECK(model.w[0] != other.w[0]);
}

TEST_CASE("mlp_forward: softmax output sums to one") {
  Rng rng(74);
  const MlpModel model = mlp_init(6, 4, 9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_points(6, 1, rng).col(0);
    const Vector probs = mlp_forward(model, x);
    REQUIRE(probs.size() == 4);
    CHECK(std::abs(probs.sum() - 1.0) < 1e-9);
    CHECK(probs.minCoeff() >= 0.0);
  }
}

TEST_CASE("mlp gradients match central differences") {
  Rng rng(75);
  const double h = 1e-5;
  const double tol = 1e-4;
  for (int trial = 0; trial < 5; ++trial) {
    MlpModel model = mlp_init(3, 4, 20 + trial);
    // Break the zero-bias symmetry so bias gradients are exercised.
    for (Vector& b : model.b) {
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        b[i] = rng.uniform(-0.3, 0.3);
      }
    }
    const Vector x = random_points(3, 1, rng).col(0);
    const int label = static_cast<int>(rng.below(4));
    const MlpGradients g = mlp_backward(model, x, label);
    REQUIRE(g.w.size() == model.w.size());

    auto loss = [&]() {
      return -std::log(mlp_forward(model, x)[label]);
    };
    for (std::size_t layer = 0; layer < model.w.size(); ++layer) {
      for (Eigen::Index i = 0; i < model.w[layer].size(); ++i) {
        double* p = model.w[layer].data() + i;
        const double saved = *p;
        *p = saved + h;
        const double up = loss();
        *p = saved - h;
        const double down = loss();
        *p = saved;
        const double fd = (up - down) / (2.0 * h);
        const double an = g.w[layer].data()[i];
        CHECK(std::abs(an - fd) <=
              tol * std::max({1.0, std::abs(an), std::abs(fd)}));
      }
      for (Eigen::Index i = 0; i < model.b[layer].size(); ++i) {
        double* p = model.b[layer].data() + i;
        const double saved = *p;
        *p = saved + h;
        const double up = loss();
        *p = saved - h;
        const double down = loss();
        *p = saved;
        const double fd = (up - down) / (2.0 * h);
        const double an = g.b[layer][i];
        CHECK(std::abs(an - fd) <=
              tol * std::max({1.0, std::abs(an), std::abs(fd)}));
      }
    }
  }
}

TEST_CASE("mlp_train: zero epochs folds standardization into the init") {
  Rng rng(76);
  const Matrix x = random_points(4, 10, rng);
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  TrainConfig config;
  config.epochs = 0;
  config.seed = 31;
  const MlpModel a = mlp_train(x, labels, 3, config);
  const MlpModel b = mlp_train(x, labels, 3, config);
  for (std::size_t layer = 0; layer < a.w.size(); ++layer) {
    CHECK(a.w[layer] == b.w[layer]);
    CHECK(a.b[layer] == b.b[layer]);
  }

  // Zero epochs still standardizes: layer 0 of the returned model is the
  // seeded initialization composed with the per-feature z-score transform.
  const MlpModel init = mlp_init(4, 3, derive_seed(31, 0));
  Vector mean(4), sd(4);
  for (Eigen::Index f = 0; f < 4; ++f) {
    mean[f] = x.row(f).mean();
    sd[f] = std::sqrt((x.row(f).array() - mean[f]).square().mean());
  }
  const Matrix w0 = init.w[0] * sd.cwiseInverse().asDiagonal();
  CHECK(a.w[0] == w0);
  CHECK(a.b[0] == Vector(-(w0 * mean)));
  for (std::size_t layer = 1; layer < a.w.size(); ++layer) {
    CHECK(a.w[layer] == init.w[layer]);
  }
}

TEST_CASE("mlp_train reaches 99% on a separable two-class toy set") {
  Rng rng(77);
  const int n = 60;
  Matrix x(2, n);
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    const int cls = i % 2;
    x(0, i) = (cls == 0 ? -1.0 : 1.0) + rng.uniform(-0.2, 0.2);
    x(1, i) = rng.uniform(-0.2, 0.2);
    labels.push_back(cls);
  }
  TrainConfig config;
  config.epochs = 200;
  config.batch_size = 8;
  config.seed = 4;
  const MlpModel model = mlp_train(x, labels, 2, config);
  const auto preds = mlp_predict_batch(model, x);
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    correct += preds[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  CHECK(static_cast<double>(correct) / n >= 0.99);
}

TEST_CASE("mlp_train: exploding updates abort") {
  Rng rng(78);
  const Matrix x = random_points(3, 8, rng);
  std::vector<int> labels(8, 0);
  labels[1] = 1;
  TrainConfig config;
  config.epochs = 5;
  config.batch_size = 2;
  config.learning_rate = 1e160;
  config.optimizer = Optimizer::kSgd;
  CHECK_THROWS_AS(mlp_train(x, labels, 2, config), std::runtime_error);
}

TEST_CASE("mlp predict: batch equals per-query, ties go low") {
  Rng rng(79);
  const MlpModel model = mlp_init(5, 6, 42);
  const Matrix queries = random_points(5, 30, rng);
  const auto batch = mlp_predict_batch(model, queries);
  REQUIRE(batch.size() == 30);
  for (int j = 0; j < 30; ++j) {
    CHECK(batch[static_cast<std::size_t>(j)] ==
          mlp_predict(model, Vector(queries.col(j))));
  }
}
