#pragma once

#include <cstdint>
#include <vector>

#include "emgtcn/labeling.hpp"
#include "emgtcn/types.hpp"

namespace emgtcn {

// Generator for synthetic freeform 3-DOF sessions: a random movement script,
// smooth joint trajectories, and amplitude-modulated Gaussian surrogate EMG
// whose per-channel envelope tracks the active movement directions.
struct SynthConfig {
  double duration_s = 360.0;  // 6 min: first half train, second half test
  int sample_rate = kDefaultSampleRate;
  int channels = kDefaultChannels;
  double hold_min_s = 0.5;
  double hold_max_s = 5.0;
  double ramp_min_s = 0.2;
  double ramp_max_s = 0.6;
  // Per-class channel gains (27 x channels). Row `c` is the plateau
  // amplitude profile of class c; empty selects the default matrix.
  Matrix gains;
  double noise_floor = 3.0;  // sigma0, amplitude with no contraction
  double noise_gain = 0.5;   // sigma1, amplitude per unit activation
  std::uint64_t seed = 1;
};

// One scripted movement: ramp to the target over ramp_s, hold for hold_s.
struct MovementSegment {
  TernaryEncoding target;
  double ramp_s = 0.0;
  double hold_s = 0.0;
};
using MovementScript = std::vector<MovementSegment>;

// Each of the six single-DOF directions drives a distinct pair of channels;
// simultaneous movements superpose additively. Rows follow pack_class order.
Matrix default_gain_matrix(int channels = kDefaultChannels);

// Random target/hold/ramp sequence starting from rest and filling the
// configured duration. Deterministic per seed; consecutive targets differ.
MovementScript movement_script(const SynthConfig& config);

// Piecewise trajectory per DOF: plateaus at -1/0/+1 in normalized units
// joined by raised-cosine ramps of the scripted duration.
std::vector<JointState> render_joints(const MovementScript& script,
                                      const SynthConfig& config);

// x[j][k] = (sigma0 + sigma1 * a[j][k]) * n, n unit white noise. The
// activation a follows the joints through ramps, so the per-window MAV
// envelope rises monotonically with contraction level.
std::vector<EmgRecord> render_emg(const std::vector<JointState>& joints,
                                  const SynthConfig& config);

struct SynthSession {
  MovementScript script;
  std::vector<JointState> joints;
  std::vector<EmgRecord> emg;
};

SynthSession synth_session(const SynthConfig& config);

}  // namespace emgtcn
