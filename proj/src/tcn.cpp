#include "emgtcn/tcn.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "emgtcn/optim.hpp"
#include "emgtcn/rng.hpp"

namespace emgtcn {

namespace {

void validate_hyper(const TcnHyper& h) {
  if (h.filters < 1 || h.taps < 1 || h.features < 1 || h.classes < 2)
    throw std::invalid_argument("tcn: invalid hyperparameters");
}

// Stack the causal receptive field of every output column: column t of the
// result holds input columns t-d+1 .. t as taps * F stacked blocks, zeros
// where the column index falls below `lower_bound(t)`.
void fill_receptive_columns(const Matrix& x, int taps, Eigen::Index lower_bound,
                            Matrix& cols, Eigen::Index out_col0,
                            Eigen::Index t0, Eigen::Index t1) {
  const auto f = x.rows();
  for (Eigen::Index t = t0; t < t1; ++t) {
    auto col = cols.col(out_col0 + (t - t0));
    for (int tap = 0; tap < taps; ++tap) {
      const Eigen::Index src = t - (taps - 1) + tap;
      if (src >= std::max<Eigen::Index>(lower_bound, 0) && src >= 0)
        col.segment(tap * f, f) = x.col(src);
      else
        col.segment(tap * f, f).setZero();
    }
  }
}

void softmax_columns(Matrix& logits) {
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    auto col = logits.col(t);
    const double mx = col.maxCoeff();
    col = (col.array() - mx).exp();
    col /= col.sum();
  }
}

int argmax_lowest(const Eigen::Ref<const Vector>& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

std::vector<double> effective_mask(const std::vector<double>& mask,
                                   Eigen::Index cols, bool final_only) {
  std::vector<double> m = mask.empty() ? std::vector<double>(cols, 1.0) : mask;
  if (static_cast<Eigen::Index>(m.size()) != cols)
    throw std::invalid_argument("tcn: mask length does not match sequence length");
  if (final_only) {
    for (std::size_t i = 0; i + 1 < m.size(); ++i) m[i] = 0.0;
  }
  return m;
}

struct AdamState {
  AdamMoments<Matrix> w, u;
  AdamMoments<Vector> b, c;
  std::int64_t steps = 0;

  explicit AdamState(const TcnParams& p) : w(p.w), u(p.u), b(p.b), c(p.c) {}
};

}  // namespace

const char* optimizer_name(Optimizer opt) {
  return opt == Optimizer::kAdam ? "adam" : "sgd";
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return Optimizer::kAdam;
  if (name == "sgd") return Optimizer::kSgd;
  throw std::invalid_argument("unknown optimizer: " + name);
}

TcnParams tcn_init(const TcnHyper& hyper, std::uint64_t seed) {
  validate_hyper(hyper);
  Rng rng(seed);
  TcnParams p;
  p.hyper = hyper;
  const int fan = hyper.taps * hyper.features;
  const double w_limit = std::sqrt(6.0 / (fan + hyper.filters));
  p.w.resize(hyper.filters, fan);
  for (int i = 0; i < hyper.filters; ++i)
    for (int j = 0; j < fan; ++j) p.w(i, j) = rng.uniform(-w_limit, w_limit);
  p.b = Vector::Zero(hyper.filters);
  const double u_limit = std::sqrt(6.0 / (hyper.filters + hyper.classes));
  p.u.resize(hyper.classes, hyper.filters);
  for (int i = 0; i < hyper.classes; ++i)
    for (int j = 0; j < hyper.filters; ++j) p.u(i, j) = rng.uniform(-u_limit, u_limit);
  p.c = Vector::Zero(hyper.classes);
  return p;
}

Matrix conv_forward(const TcnParams& params, const FeatureSequence& x) {
  if (x.rows() != params.hyper.features)
    throw std::invalid_argument("conv_forward: input feature count does not match F");
  if (x.cols() < 1) throw std::invalid_argument("conv_forward: empty sequence");
  Matrix cols(params.hyper.taps * params.hyper.features, x.cols());
  fill_receptive_columns(x, params.hyper.taps, 0, cols, 0, 0, x.cols());
  Matrix pre = params.w * cols;
  pre.colwise() += params.b;
  return pre.cwiseMax(0.0);
}

Matrix head_forward(const TcnParams& params, const Matrix& feature_map) {
  if (feature_map.rows() != params.hyper.filters)
    throw std::invalid_argument("head_forward: feature map row count does not match M");
  Matrix logits = params.u * feature_map;
  logits.colwise() += params.c;
  softmax_columns(logits);
  return logits;
}

TcnForward tcn_forward(const TcnParams& params, const FeatureSequence& x) {
  TcnForward out;
  out.feature_map = conv_forward(params, x);
  out.probs = head_forward(params, out.feature_map);
  return out;
}

double sequence_loss(const Matrix& probs, const std::vector<int>& labels,
                     const std::vector<double>& mask) {
  if (static_cast<Eigen::Index>(labels.size()) != probs.cols())
    throw std::invalid_argument("sequence_loss: one label per column required");
  const auto m = effective_mask(mask, probs.cols(), false);
  double total = 0.0;
  double weight = 0.0;
  for (Eigen::Index t = 0; t < probs.cols(); ++t) {
    if (m[t] == 0.0) continue;
    const int y = labels[t];
    if (y < 0 || y >= probs.rows())
      throw std::invalid_argument("sequence_loss: label outside [0, C)");
    total += m[t] * -std::log(probs(y, t));
    weight += m[t];
  }
  if (weight <= 0.0) throw std::invalid_argument("sequence_loss: empty mask");
  return total / weight;
}

TcnGradients tcn_backward(const TcnParams& params, const FeatureSequence& x,
                          const std::vector<int>& labels,
                          const std::vector<double>& mask) {
  if (static_cast<Eigen::Index>(labels.size()) != x.cols())
    throw std::invalid_argument("tcn_backward: one label per column required");
  const auto m = effective_mask(mask, x.cols(), false);
  const double weight = std::accumulate(m.begin(), m.end(), 0.0);
  if (weight <= 0.0) throw std::invalid_argument("tcn_backward: empty mask");

  Matrix cols(params.hyper.taps * params.hyper.features, x.cols());
  fill_receptive_columns(x, params.hyper.taps, 0, cols, 0, 0, x.cols());
  Matrix pre = params.w * cols;
  pre.colwise() += params.b;
  const Matrix feature_map = pre.cwiseMax(0.0);
  Matrix dlogits = head_forward(params, feature_map);  // softmax probabilities

  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    if (m[t] == 0.0) {
      dlogits.col(t).setZero();
      continue;
    }
    dlogits(labels[t], t) -= 1.0;
    dlogits.col(t) *= m[t] / weight;
  }

  TcnGradients g;
  g.u = dlogits * feature_map.transpose();
  g.c = dlogits.rowwise().sum();
  Matrix dpre = params.u.transpose() * dlogits;
  dpre = (feature_map.array() > 0.0).select(dpre, 0.0);
  g.w = dpre * cols.transpose();
  g.b = dpre.rowwise().sum();
  return g;
}

TcnParams tcn_train(const std::vector<TrainSample>& data, const TcnHyper& hyper,
                    const TrainConfig& config) {
  validate_hyper(hyper);
  if (data.empty()) throw std::invalid_argument("tcn_train: empty dataset");
  if (config.epochs < 0) throw std::invalid_argument("tcn_train: epochs must be >= 0");
  if (config.learning_rate <= 0.0) throw std::invalid_argument("tcn_train: learning rate must be > 0");
  if (config.batch_size < 1) throw std::invalid_argument("tcn_train: batch size must be >= 1");

  const Eigen::Index seq_len = data.front().x.cols();
  for (const auto& s : data) {
    if (s.x.rows() != hyper.features || s.x.cols() != seq_len)
      throw std::invalid_argument("tcn_train: inconsistent sample shapes");
    if (static_cast<Eigen::Index>(s.labels.size()) != seq_len)
      throw std::invalid_argument("tcn_train: one label per column required");
    for (int y : s.labels)
      if (y < 0 || y >= hyper.classes)
        throw std::invalid_argument("tcn_train: label outside [0, C)");
  }

  TcnParams params = tcn_init(hyper, derive_seed(config.seed, 0));
  Rng shuffle_rng(derive_seed(config.seed, 1));
  AdamState adam(params);

  const int rf = hyper.taps * hyper.features;
  const auto n = static_cast<std::int64_t>(data.size());
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // Per-sample column weights, normalized so each sample contributes its
  // masked-mean loss.
  std::vector<std::vector<double>> col_weight(n);
  for (std::int64_t i = 0; i < n; ++i) {
    auto m = effective_mask(data[i].mask, seq_len, config.final_column_loss);
    const double w = std::accumulate(m.begin(), m.end(), 0.0);
    if (w <= 0.0) throw std::invalid_argument("tcn_train: sample with empty mask");
    for (auto& v : m) v /= w;
    col_weight[i] = std::move(m);
  }

  Matrix cols(rf, static_cast<Eigen::Index>(config.batch_size) * seq_len);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::int64_t start = 0; start < n; start += config.batch_size) {
      const auto batch = std::min<std::int64_t>(config.batch_size, n - start);
      const Eigen::Index bcols = batch * seq_len;
      for (std::int64_t k = 0; k < batch; ++k)
        fill_receptive_columns(data[order[start + k]].x, hyper.taps, 0, cols,
                               k * seq_len, 0, seq_len);

      Matrix pre = params.w * cols.leftCols(bcols);
      pre.colwise() += params.b;
      const Matrix feature_map = pre.cwiseMax(0.0);
      Matrix dlogits = params.u * feature_map;
      dlogits.colwise() += params.c;
      softmax_columns(dlogits);

      double batch_loss = 0.0;
      for (std::int64_t k = 0; k < batch; ++k) {
        const auto& sample = data[order[start + k]];
        const auto& weights = col_weight[order[start + k]];
        for (Eigen::Index t = 0; t < seq_len; ++t) {
          const Eigen::Index col = k * seq_len + t;
          if (weights[t] == 0.0) {
            dlogits.col(col).setZero();
            continue;
          }
          batch_loss += weights[t] * -std::log(dlogits(sample.labels[t], col));
          dlogits(sample.labels[t], col) -= 1.0;
          dlogits.col(col) *= weights[t] / static_cast<double>(batch);
        }
      }
      if (!std::isfinite(batch_loss))
        throw std::runtime_error(
            "tcn_train: non-finite loss at epoch " + std::to_string(epoch) +
            " (learning rate too high?)");

      TcnGradients g;
      g.u = dlogits * feature_map.transpose();
      g.c = dlogits.rowwise().sum();
      Matrix dpre = params.u.transpose() * dlogits;
      dpre = (feature_map.array() > 0.0).select(dpre, 0.0);
      g.w = dpre * cols.leftCols(bcols).transpose();
      g.b = dpre.rowwise().sum();

      if (config.optimizer == Optimizer::kAdam) {
        const auto t = ++adam.steps;
        adam_step(params.w, adam.w, g.w, config.learning_rate, t);
        adam_step(params.b, adam.b, g.b, config.learning_rate, t);
        adam_step(params.u, adam.u, g.u, config.learning_rate, t);
        adam_step(params.c, adam.c, g.c, config.learning_rate, t);
      } else {
        params.w -= config.learning_rate * g.w;
        params.b -= config.learning_rate * g.b;
        params.u -= config.learning_rate * g.u;
        params.c -= config.learning_rate * g.c;
      }
    }
  }
  return params;
}

double tcn_dataset_loss(const TcnParams& params, const std::vector<TrainSample>& data) {
  if (data.empty()) throw std::invalid_argument("tcn_dataset_loss: empty dataset");
  double total = 0.0;
  for (const auto& s : data) {
    const auto out = tcn_forward(params, s.x);
    total += sequence_loss(out.probs, s.labels, s.mask);
  }
  return total / static_cast<double>(data.size());
}

std::vector<int> tcn_predict_matrix(const TcnParams& params,
                                    const Matrix& features, int sequence_len) {
  if (sequence_len < 1) throw std::invalid_argument("tcn_predict: sequence length must be >= 1");
  if (features.rows() != params.hyper.features)
    throw std::invalid_argument("tcn_predict: feature dimension does not match F");
  const auto len = features.cols();
  std::vector<int> out;
  if (len == 0) return out;

  // The prediction at step t is the final column of the forward pass on the
  // zero-padded sequence ending at t. That column only sees columns
  // t-d+1 .. t clipped at the sequence start, so the whole stream can be
  // convolved in one pass with a per-column receptive-field lower bound.
  const int rf = params.hyper.taps * params.hyper.features;
  const auto f = features.rows();
  Matrix cols(rf, len);
  for (Eigen::Index t = 0; t < len; ++t) {
    auto col = cols.col(t);
    const Eigen::Index lb = std::max<Eigen::Index>(0, t - sequence_len + 1);
    for (int tap = 0; tap < params.hyper.taps; ++tap) {
      const Eigen::Index src = t - (params.hyper.taps - 1) + tap;
      if (src >= lb)
        col.segment(tap * f, f) = features.col(src);
      else
        col.segment(tap * f, f).setZero();
    }
  }
  Matrix pre = params.w * cols;
  pre.colwise() += params.b;
  Matrix logits = params.u * pre.cwiseMax(0.0);
  logits.colwise() += params.c;

  out.reserve(len);
  for (Eigen::Index t = 0; t < len; ++t) out.push_back(argmax_lowest(logits.col(t)));
  return out;
}

PredictionStream tcn_predict_stream(const TcnParams& params,
                                    const std::vector<FeatureVector>& features,
                                    int sequence_len) {
  PredictionStream stream;
  if (features.empty()) return stream;
  stream.t0 = features.front().t;
  stream.classes = tcn_predict_matrix(params, feature_matrix(features), sequence_len);
  return stream;
}

}  // namespace emgtcn
