#pragma once

#include <array>
#include <optional>
#include <vector>

#include "emgtcn/types.hpp"

namespace emgtcn {

// Per-DOF ternary movement state: -1 reverse, 0 rest, +1 forward.
struct TernaryEncoding {
  std::array<int, kNumDofs> e{0, 0, 0};
  bool operator==(const TernaryEncoding&) const = default;
};

// Per-DOF range calibration and the derived class thresholds. A DOF reads
// +1 above hi, -1 below lo, 0 otherwise; hi and lo sit halfway between the
// rest position and the respective range boundary.
struct CalibrationProfile {
  Eigen::Vector3d theta_min;
  Eigen::Vector3d theta_max;
  Eigen::Vector3d theta_rest;
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
};

enum class StateTag { kSteady, kTransient };

// Per-DOF extremes come from the observed trajectory; the rest position is
// the per-DOF median unless overridden. Degenerate ranges are an error.
CalibrationProfile calibrate(
    const std::vector<JointState>& trajectory,
    const std::optional<Eigen::Vector3d>& rest_override = std::nullopt);

// Strict threshold comparison; values exactly at a threshold read as rest.
int encode_dof(double theta, const CalibrationProfile& profile, int dof);

TernaryEncoding encode(const Eigen::Vector3d& theta,
                       const CalibrationProfile& profile);

// Ternary triple <-> class index in [0, 27). pack((0,0,0)) == 13.
inline constexpr int kRestClass = 13;
int pack_class(const TernaryEncoding& e);
TernaryEncoding unpack_class(int c);

// One class label per feature time-step, taken from the joint state at the
// final sample of that step's window (causal, window-end alignment).
std::vector<int> label_stream(const std::vector<JointState>& joints,
                              const CalibrationProfile& profile, int step,
                              int window_len);

// Steady/transient tag per feature time-step. Central-difference joint
// velocities are averaged over each window, normalized per DOF by the
// maximum observed smoothed speed, and a step is Transient when the
// Euclidean norm of the normalized velocity vector exceeds v_thresh.
std::vector<StateTag> tag_states(const std::vector<JointState>& joints,
                                 double v_thresh, int step, int window_len);

}  // namespace emgtcn
