#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vain/layers.hpp"

namespace vain {

struct GradCheckConfig {
  double eps = 1e-6;
  int max_samples = 256;  // parameter coordinates probed per run
  uint64_t seed = 12345;
};

// Central-difference check of already-computed analytic gradients. `loss_fn`
// must re-run the forward pass against the current parameter values; the grad
// buffers in `params` must hold the analytic gradient of that same loss.
// Returns the max relative error over the sampled coordinates, where the
// denominator is floored at 1e-3 so near-zero gradients are compared
// absolutely.
double grad_check(const std::function<double()>& loss_fn, const std::vector<ParamRef>& params,
                  const GradCheckConfig& cfg = {});

}  // namespace vain
