#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace emgtcn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr int kNumDofs = 3;
constexpr int kNumClasses = 27;  // 3^3 simultaneous ternary states
constexpr int kDefaultChannels = 8;
constexpr int kDefaultSampleRate = 200;

// One raw EMG sample: channels[j] is the amplitude of electrode j at sample
// index t. Sample indices increase by 1 within a session.
struct EmgRecord {
  std::int64_t t = 0;
  Vector channels;
};

// One joint-position sample, aligned with the EMG stream. theta holds the
// three DOF positions in whatever consistent unit the session uses.
struct JointState {
  std::int64_t t = 0;
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
};

}  // namespace emgtcn
