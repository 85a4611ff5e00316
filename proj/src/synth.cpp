#include "emgtcn/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "emgtcn/rng.hpp"

namespace emgtcn {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Channel pairs excited by each single-DOF movement direction, in the order
// dof0+, dof0-, dof1+, dof1-, dof2+, dof2-. Opposing directions use disjoint
// pairs (antagonist placement) and the third DOF borrows one channel from
// each of the first two, so all 27 class profiles stay distinct.
constexpr int kDirectionChannels[6][2] = {
    {0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 4}, {2, 6},
};

int direction_index(int dof, int sign) { return dof * 2 + (sign > 0 ? 0 : 1); }

void check_config(const SynthConfig& config) {
  if (config.duration_s <= 0.0) {
    throw std::invalid_argument("synth: duration must be positive");
  }
  if (config.sample_rate < 1) {
    throw std::invalid_argument("synth: sample rate must be at least 1");
  }
  if (config.channels < 1) {
    throw std::invalid_argument("synth: need at least one channel");
  }
  if (config.hold_min_s <= 0.0 || config.hold_max_s < config.hold_min_s) {
    throw std::invalid_argument("synth: bad hold range");
  }
  if (config.ramp_min_s < 0.0 || config.ramp_max_s < config.ramp_min_s) {
    throw std::invalid_argument("synth: bad ramp range");
  }
  if (config.noise_floor <= 0.0 || config.noise_gain < 0.0) {
    throw std::invalid_argument("synth: bad noise amplitudes");
  }
  if (config.gains.size() != 0 &&
      (config.gains.rows() != kNumClasses ||
       config.gains.cols() != config.channels)) {
    throw std::invalid_argument("synth: gain matrix must be 27 x channels");
  }
}

Matrix session_gains(const SynthConfig& config) {
  return config.gains.size() == 0 ? default_gain_matrix(config.channels)
                                  : config.gains;
}

}  // namespace

Matrix default_gain_matrix(int channels) {
  if (channels < 1) {
    throw std::invalid_argument("synth: need at least one channel");
  }
  Matrix direction = Matrix::Zero(6, channels);
  for (int d = 0; d < 6; ++d) {
    direction(d, kDirectionChannels[d][0] % channels) += 1.0;
    direction(d, kDirectionChannels[d][1] % channels) += 1.0;
  }
  Matrix gains = Matrix::Zero(kNumClasses, channels);
  for (int c = 0; c < kNumClasses; ++c) {
    const TernaryEncoding enc = unpack_class(c);
    for (int dof = 0; dof < kNumDofs; ++dof) {
      if (enc.e[dof] != 0) {
        gains.row(c) += direction.row(direction_index(dof, enc.e[dof]));
      }
    }
  }
  return gains;
}

MovementScript movement_script(const SynthConfig& config) {
  check_config(config);
  Rng rng(derive_seed(config.seed, 0));
  MovementScript script;
  int prev = kRestClass;
  double total_s = 0.0;
  while (total_s < config.duration_s) {
    // One draw over the 26 non-repeating classes keeps the stream aligned.
    int pick = rng.below(kNumClasses - 1);
    if (pick >= prev) {
      ++pick;
    }
    MovementSegment seg;
    seg.target = unpack_class(pick);
    seg.ramp_s = rng.uniform(config.ramp_min_s, config.ramp_max_s);
    seg.hold_s = rng.uniform(config.hold_min_s, config.hold_max_s);
    script.push_back(seg);
    total_s += seg.ramp_s + seg.hold_s;
    prev = pick;
  }
  return script;
}

std::vector<JointState> render_joints(const MovementScript& script,
                                      const SynthConfig& config) {
  check_config(config);
  const std::int64_t n =
      std::llround(config.duration_s * config.sample_rate);
  std::vector<JointState> joints;
  joints.reserve(static_cast<std::size_t>(n));
  Eigen::Vector3d level = Eigen::Vector3d::Zero();
  std::int64_t t = 0;
  for (const MovementSegment& seg : script) {
    Eigen::Vector3d target;
    for (int dof = 0; dof < kNumDofs; ++dof) {
      target[dof] = static_cast<double>(seg.target.e[dof]);
    }
    const std::int64_t ramp_n =
        std::llround(seg.ramp_s * config.sample_rate);
    for (std::int64_t i = 0; i < ramp_n && t < n; ++i, ++t) {
      const double s = static_cast<double>(i + 1) / static_cast<double>(ramp_n);
      const double blend = 0.5 * (1.0 - std::cos(kPi * s));
      joints.push_back({t, level + blend * (target - level)});
    }
    if (t >= n) {
      break;
    }
    level = target;
    const std::int64_t hold_n =
        std::llround(seg.hold_s * config.sample_rate);
    for (std::int64_t i = 0; i < hold_n && t < n; ++i, ++t) {
      joints.push_back({t, level});
    }
    if (t >= n) {
      break;
    }
  }
  // Scripts cover the duration by construction; top up any rounding shortfall.
  for (; t < n; ++t) {
    joints.push_back({t, level});
  }
  return joints;
}

std::vector<EmgRecord> render_emg(const std::vector<JointState>& joints,
                                  const SynthConfig& config) {
  check_config(config);
  const Matrix gains = session_gains(config);
  const Vector rest = gains.row(kRestClass).transpose();
  // Per-direction envelope contributions, recovered from the class profiles
  // of the six single-DOF movements. Fractional joint excursions scale them
  // linearly, which reproduces the class rows exactly at full excursion.
  Matrix direction(6, config.channels);
  for (int dof = 0; dof < kNumDofs; ++dof) {
    for (int sign : {+1, -1}) {
      TernaryEncoding enc;
      enc.e[dof] = sign;
      direction.row(direction_index(dof, sign)) =
          gains.row(pack_class(enc)) - rest.transpose();
    }
  }

  Rng rng(derive_seed(config.seed, 1));
  std::vector<EmgRecord> emg;
  emg.reserve(joints.size());
  for (const JointState& js : joints) {
    Vector activation = rest;
    for (int dof = 0; dof < kNumDofs; ++dof) {
      const double excursion = js.theta[dof];
      if (excursion != 0.0) {
        activation += std::abs(excursion) *
                      direction.row(direction_index(dof, excursion > 0.0 ? +1
                                                                         : -1))
                          .transpose();
      }
    }
    EmgRecord rec;
    rec.t = js.t;
    rec.channels.resize(config.channels);
    for (int k = 0; k < config.channels; ++k) {
      const double sigma =
          config.noise_floor +
          config.noise_gain * std::max(activation[k], 0.0);
      rec.channels[k] = sigma * rng.normal();
    }
    emg.push_back(std::move(rec));
  }
  return emg;
}

SynthSession synth_session(const SynthConfig& config) {
  SynthSession session;
  session.script = movement_script(config);
  session.joints = render_joints(session.script, config);
  session.emg = render_emg(session.joints, config);
  return session;
}

}  // namespace emgtcn
