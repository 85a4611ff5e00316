#include "emgtcn/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emgtcn {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

CalibrationProfile calibrate(const std::vector<JointState>& trajectory,
                             const std::optional<Eigen::Vector3d>& rest_override) {
  if (trajectory.empty()) throw std::invalid_argument("calibrate: empty trajectory");

  CalibrationProfile p;
  for (int i = 0; i < kNumDofs; ++i) {
    std::vector<double> values;
    values.reserve(trajectory.size());
    for (const auto& s : trajectory) values.push_back(s.theta[i]);

    p.theta_min[i] = *std::min_element(values.begin(), values.end());
    p.theta_max[i] = *std::max_element(values.begin(), values.end());
    p.theta_rest[i] = rest_override ? (*rest_override)[i] : median(values);

    if (!(p.theta_min[i] < p.theta_rest[i] && p.theta_rest[i] < p.theta_max[i]))
      throw std::invalid_argument(
          "calibrate: degenerate range on DOF " + std::to_string(i) +
          " (need theta_min < theta_rest < theta_max)");

    p.hi[i] = p.theta_rest[i] + 0.5 * (p.theta_max[i] - p.theta_rest[i]);
    p.lo[i] = p.theta_rest[i] - 0.5 * (p.theta_rest[i] - p.theta_min[i]);
  }
  return p;
}

int encode_dof(double theta, const CalibrationProfile& profile, int dof) {
  if (dof < 0 || dof >= kNumDofs) throw std::invalid_argument("encode_dof: bad DOF index");
  if (theta > profile.hi[dof]) return 1;
  if (theta < profile.lo[dof]) return -1;
  return 0;
}

TernaryEncoding encode(const Eigen::Vector3d& theta,
                       const CalibrationProfile& profile) {
  TernaryEncoding enc;
  for (int i = 0; i < kNumDofs; ++i) enc.e[i] = encode_dof(theta[i], profile, i);
  return enc;
}

int pack_class(const TernaryEncoding& e) {
  for (int v : e.e) {
    if (v < -1 || v > 1) throw std::invalid_argument("pack_class: component outside {-1,0,1}");
  }
  return (e.e[0] + 1) * 9 + (e.e[1] + 1) * 3 + (e.e[2] + 1);
}

TernaryEncoding unpack_class(int c) {
  if (c < 0 || c >= kNumClasses) throw std::invalid_argument("unpack_class: index outside [0,27)");
  TernaryEncoding e;
  e.e[0] = c / 9 - 1;
  e.e[1] = (c / 3) % 3 - 1;
  e.e[2] = c % 3 - 1;
  return e;
}

std::vector<int> label_stream(const std::vector<JointState>& joints,
                              const CalibrationProfile& profile, int step,
                              int window_len) {
  if (window_len < 2) throw std::invalid_argument("label_stream: window_len must be >= 2");
  if (step < 1) throw std::invalid_argument("label_stream: step must be >= 1");
  const auto n = static_cast<std::int64_t>(joints.size());
  std::vector<int> labels;
  if (n < window_len) return labels;
  const std::int64_t count = (n - window_len) / step + 1;
  labels.reserve(count);
  for (std::int64_t t = 0; t < count; ++t) {
    const auto& state = joints[t * step + window_len - 1];
    labels.push_back(pack_class(encode(state.theta, profile)));
  }
  return labels;
}

std::vector<StateTag> tag_states(const std::vector<JointState>& joints,
                                 double v_thresh, int step, int window_len) {
  if (joints.size() < 2) throw std::invalid_argument("tag_states: need >= 2 joint samples");
  if (window_len < 2) throw std::invalid_argument("tag_states: window_len must be >= 2");
  if (step < 1) throw std::invalid_argument("tag_states: step must be >= 1");

  const auto n = static_cast<std::int64_t>(joints.size());

  // Central-difference velocity per sample, one-sided at the stream edges.
  Matrix vel(kNumDofs, n);
  for (int i = 0; i < kNumDofs; ++i) {
    vel(i, 0) = joints[1].theta[i] - joints[0].theta[i];
    vel(i, n - 1) = joints[n - 1].theta[i] - joints[n - 2].theta[i];
    for (std::int64_t k = 1; k < n - 1; ++k)
      vel(i, k) = 0.5 * (joints[k + 1].theta[i] - joints[k - 1].theta[i]);
  }

  std::vector<StateTag> tags;
  if (n < window_len) return tags;
  const std::int64_t count = (n - window_len) / step + 1;

  // Window-mean velocity per step, then per-DOF normalization by the
  // maximum smoothed speed observed in this stream.
  Matrix smoothed(kNumDofs, count);
  for (std::int64_t t = 0; t < count; ++t)
    smoothed.col(t) = vel.middleCols(t * step, window_len).rowwise().mean();

  Eigen::Vector3d max_speed = smoothed.cwiseAbs().rowwise().maxCoeff();
  for (int i = 0; i < kNumDofs; ++i) {
    if (max_speed[i] == 0.0) max_speed[i] = 1.0;  // motionless DOF stays at 0
  }

  tags.reserve(count);
  for (std::int64_t t = 0; t < count; ++t) {
    const double norm = (smoothed.col(t).cwiseQuotient(max_speed)).norm();
    tags.push_back(norm > v_thresh ? StateTag::kTransient : StateTag::kSteady);
  }
  return tags;
}

}  // namespace emgtcn
