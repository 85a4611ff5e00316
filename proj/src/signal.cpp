#include "emgtcn/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace emgtcn {

int feature_dim(FeatureMode mode, int channels) {
  return mode == FeatureMode::kMav ? channels : kTd5PerChannel * channels;
}

const char* feature_mode_name(FeatureMode mode) {
  return mode == FeatureMode::kMav ? "mav" : "td5";
}

FeatureMode parse_feature_mode(const std::string& name) {
  if (name == "mav") return FeatureMode::kMav;
  if (name == "td5") return FeatureMode::kTd5;
  throw std::invalid_argument("unknown feature mode: " + name);
}

std::vector<Window> frame_stream(const std::vector<EmgRecord>& records,
                                 int window_len, int step) {
  if (window_len < 2) throw std::invalid_argument("window_len must be >= 2");
  if (step < 1) throw std::invalid_argument("step must be >= 1");
  const auto n = static_cast<std::int64_t>(records.size());
  std::vector<Window> windows;
  if (n < window_len) return windows;

  const auto channels = records.front().channels.size();
  for (const auto& r : records) {
    if (r.channels.size() != channels)
      throw std::invalid_argument("inconsistent channel count in record stream");
  }

  const std::int64_t count = (n - window_len) / step + 1;
  windows.reserve(count);
  for (std::int64_t w = 0; w < count; ++w) {
    Window win;
    win.start = w * step;
    win.samples.resize(channels, window_len);
    for (int i = 0; i < window_len; ++i)
      win.samples.col(i) = records[win.start + i].channels;
    windows.push_back(std::move(win));
  }
  return windows;
}

double mav(const Vector& x) {
  if (x.size() < 1) throw std::invalid_argument("mav: empty window");
  return x.cwiseAbs().mean();
}

double waveform_length(const Vector& x) {
  if (x.size() < 2) throw std::invalid_argument("waveform_length: need >= 2 samples");
  double wl = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i) wl += std::abs(x[i] - x[i - 1]);
  return wl;
}

double variance(const Vector& x) {
  if (x.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(x.size());
}

namespace {
int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }
}  // namespace

int zero_crossings(const Vector& x, double eps) {
  if (x.size() < 2) throw std::invalid_argument("zero_crossings: need >= 2 samples");
  if (eps < 0.0) throw std::invalid_argument("zero_crossings: eps must be >= 0");
  int count = 0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    if (sign_of(x[i]) * sign_of(x[i + 1]) < 0 && std::abs(x[i] - x[i + 1]) >= eps)
      ++count;
  }
  return count;
}

int slope_sign_changes(const Vector& x, double eps) {
  if (x.size() < 3) throw std::invalid_argument("slope_sign_changes: need >= 3 samples");
  if (eps < 0.0) throw std::invalid_argument("slope_sign_changes: eps must be >= 0");
  int count = 0;
  for (Eigen::Index i = 1; i + 1 < x.size(); ++i) {
    const double dl = x[i] - x[i - 1];
    const double dr = x[i] - x[i + 1];
    if (dl * dr > 0.0 && std::max(std::abs(dl), std::abs(dr)) >= eps) ++count;
  }
  return count;
}

FeatureVector extract_features(const Window& w, FeatureMode mode, double eps) {
  const auto channels = w.samples.rows();
  FeatureVector fv;
  fv.mode = mode;
  fv.values.resize(feature_dim(mode, static_cast<int>(channels)));
  for (Eigen::Index j = 0; j < channels; ++j) {
    const Vector x = w.samples.row(j).transpose();
    if (mode == FeatureMode::kMav) {
      fv.values[j] = mav(x);
    } else {
      fv.values[kTd5PerChannel * j + 0] = mav(x);
      fv.values[kTd5PerChannel * j + 1] = waveform_length(x);
      fv.values[kTd5PerChannel * j + 2] = variance(x);
      fv.values[kTd5PerChannel * j + 3] = slope_sign_changes(x, eps);
      fv.values[kTd5PerChannel * j + 4] = zero_crossings(x, eps);
    }
  }
  return fv;
}

std::vector<FeatureVector> extract_stream(const std::vector<EmgRecord>& records,
                                          int window_len, int step,
                                          FeatureMode mode, double eps) {
  std::vector<FeatureVector> features;
  auto windows = frame_stream(records, window_len, step);
  features.reserve(windows.size());
  std::int64_t t = 0;
  for (const auto& w : windows) {
    auto fv = extract_features(w, mode, eps);
    fv.t = t++;
    features.push_back(std::move(fv));
  }
  return features;
}

std::vector<FeatureSequence> build_sequences(
    const std::vector<FeatureVector>& features, int sequence_len) {
  if (sequence_len < 1) throw std::invalid_argument("sequence length must be >= 1");
  std::vector<FeatureSequence> sequences;
  if (features.empty()) return sequences;

  const auto dim = features.front().values.size();
  const auto n = static_cast<std::int64_t>(features.size());
  sequences.reserve(n);
  for (std::int64_t t = 0; t < n; ++t) {
    FeatureSequence seq = Matrix::Zero(dim, sequence_len);
    for (int k = 0; k < sequence_len; ++k) {
      const std::int64_t src = t - (sequence_len - 1) + k;
      if (src >= 0) seq.col(k) = features[src].values;
    }
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

Matrix feature_matrix(const std::vector<FeatureVector>& features) {
  if (features.empty()) return Matrix();
  Matrix m(features.front().values.size(), features.size());
  for (std::size_t i = 0; i < features.size(); ++i) m.col(i) = features[i].values;
  return m;
}

}  // namespace emgtcn
