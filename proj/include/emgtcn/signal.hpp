#pragma once

#include <string>
#include <vector>

#include "emgtcn/types.hpp"

namespace emgtcn {

// Feature representation extracted from each sliding window.
//   kMav: mean absolute value per channel (8 values for 8 channels)
//   kTd5: MAV, waveform length, variance, slope sign changes, zero
//         crossings per channel (40 values for 8 channels)
enum class FeatureMode { kMav, kTd5 };

constexpr int kTd5PerChannel = 5;

int feature_dim(FeatureMode mode, int channels);
const char* feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(const std::string& name);

// One sliding window of raw EMG. samples(j, i) is channel j at offset i from
// the window start.
struct Window {
  std::int64_t start = 0;
  Matrix samples;
};

struct FeatureVector {
  std::int64_t t = 0;  // feature time-step index, one per window
  Vector values;
  FeatureMode mode = FeatureMode::kMav;
};

// F x T matrix of feature vectors, oldest column first, newest (current
// time-step) in column T-1.
using FeatureSequence = Matrix;

// Windows at starts 0, step, 2*step, ... whose full extent fits in the
// record stream. A stream shorter than window_len yields no windows.
std::vector<Window> frame_stream(const std::vector<EmgRecord>& records,
                                 int window_len, int step);

// Time-domain features of a single-channel window.
double mav(const Vector& x);
double waveform_length(const Vector& x);
double variance(const Vector& x);  // population variance, 1/W normalization

// Sign changes between consecutive samples with both sides nonzero and an
// amplitude excursion of at least eps. A sample exactly at zero never
// produces a crossing.
int zero_crossings(const Vector& x, double eps);

// Interior local extrema whose larger neighboring slope is at least eps.
int slope_sign_changes(const Vector& x, double eps);

// Per-channel feature blocks; TD5 blocks are ordered [MAV, WL, VAR, SSC, ZC].
FeatureVector extract_features(const Window& w, FeatureMode mode, double eps);

// frame_stream + extract_features over a whole session.
std::vector<FeatureVector> extract_stream(const std::vector<EmgRecord>& records,
                                          int window_len, int step,
                                          FeatureMode mode, double eps);

// One sequence per time-step. Sequences ending before step T-1 are
// left-padded with zero columns so every step gets a prediction.
std::vector<FeatureSequence> build_sequences(
    const std::vector<FeatureVector>& features, int sequence_len);

// Feature stream as a K x L matrix (column per time-step).
Matrix feature_matrix(const std::vector<FeatureVector>& features);

}  // namespace emgtcn
