#include "dhypr/adam.hpp"

#include <cmath>

namespace dhypr {

void adam_step(std::span<ad::Matrix* const> params, std::span<const ad::Matrix> grads,
               AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ContractViolation("adam_step: " + std::to_string(params.size()) + " params but " +
                            std::to_string(grads.size()) + " gradients");
  }
  if (state.first_moment.empty()) {
    for (const auto* p : params) {
      state.first_moment.emplace_back(p->rows(), p->cols());
      state.second_moment.emplace_back(p->rows(), p->cols());
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ContractViolation("adam_step: optimizer state does not match parameter list");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    ad::Matrix& p = *params[k];
    const ad::Matrix& g = grads[k];
    ad::Matrix& m = state.first_moment[k];
    ad::Matrix& v = state.second_moment[k];
    if (g.shape() != p.shape() || m.shape() != p.shape()) {
      throw ContractViolation("adam_step: shape mismatch for parameter " + std::to_string(k));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      if (cfg.weight_decay != 0.0) p[i] -= cfg.lr * cfg.weight_decay * p[i];
      p[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

}  // namespace dhypr
