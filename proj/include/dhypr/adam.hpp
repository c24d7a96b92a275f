#pragma once

#include <span>
#include <vector>

#include "dhypr/tensor.hpp"

namespace dhypr {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Decoupled (AdamW-style) decay, applied as p -= lr * weight_decay * p.
  double weight_decay = 0.0;
};

struct AdamState {
  std::vector<ad::Matrix> first_moment;
  std::vector<ad::Matrix> second_moment;
  long step = 0;
};

// One bias-corrected Adam update, in place. State is lazily sized on the
// first call; afterwards params/grads/state must keep the same shapes.
void adam_step(std::span<ad::Matrix* const> params, std::span<const ad::Matrix> grads,
               AdamState& state, const AdamConfig& cfg);

}  // namespace dhypr
