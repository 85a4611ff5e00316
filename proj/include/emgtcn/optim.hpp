#pragma once

#include <cmath>
#include <cstdint>

#include "emgtcn/types.hpp"

namespace emgtcn {

// Adaptive first/second-moment gradient step shared by the sequence model
// and the MLP baseline.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

template <typename TensorT>
struct AdamMoments {
  TensorT m;
  TensorT v;
  explicit AdamMoments(const TensorT& like)
      : m(TensorT::Zero(like.rows(), like.cols())),
        v(TensorT::Zero(like.rows(), like.cols())) {}
};

template <typename TensorT>
void adam_step(TensorT& param, AdamMoments<TensorT>& s, const TensorT& grad,
               double lr, std::int64_t t) {
  s.m = kAdamBeta1 * s.m + (1.0 - kAdamBeta1) * grad;
  s.v = (kAdamBeta2 * s.v.array() + (1.0 - kAdamBeta2) * grad.array().square()).matrix();
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
  param.array() -= lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + kAdamEps);
}

}  // namespace emgtcn
