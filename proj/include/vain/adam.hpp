#pragma once

#include <cstdint>
#include <vector>

#include "vain/layers.hpp"

namespace vain {

struct AdamState {
  std::vector<double> m, v;
  int64_t t = 0;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init(size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
  }
};

size_t total_param_count(const std::vector<ParamRef>& params);

// One bias-corrected update over all parameter tensors, in order.
void adam_step(const std::vector<ParamRef>& params, AdamState& state);

}  // namespace vain
