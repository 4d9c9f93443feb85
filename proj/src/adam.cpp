#include "vain/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace vain {

size_t total_param_count(const std::vector<ParamRef>& params) {
  size_t n = 0;
  for (const auto& p : params) n += p.n;
  return n;
}

void adam_step(const std::vector<ParamRef>& params, AdamState& state) {
  const size_t total = total_param_count(params);
  if (state.m.size() != total) throw std::invalid_argument("adam_step: state size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  size_t k = 0;
  for (const auto& p : params) {
    for (size_t i = 0; i < p.n; ++i, ++k) {
      const double g = p.grad[i];
      state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
      state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
      const double mhat = state.m[k] / bc1;
      const double vhat = state.v[k] / bc2;
      p.value[i] -= state.alpha * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace vain
