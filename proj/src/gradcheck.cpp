#include "vain/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vain/rng.hpp"

namespace vain {

double grad_check(const std::function<double()>& loss_fn, const std::vector<ParamRef>& params,
                  const GradCheckConfig& cfg) {
  // Flatten coordinates as (tensor, offset) pairs.
  std::vector<std::pair<size_t, size_t>> coords;
  for (size_t p = 0; p < params.size(); ++p) {
    for (size_t i = 0; i < params[p].n; ++i) coords.emplace_back(p, i);
  }
  if (coords.size() > static_cast<size_t>(cfg.max_samples)) {
    Rng rng(cfg.seed);
    shuffle_inplace(coords, rng);
    coords.resize(cfg.max_samples);
  }
  double worst = 0.0;
  for (const auto& [p, i] : coords) {
    double* v = params[p].value + i;
    const double saved = *v;
    *v = saved + cfg.eps;
    const double fp = loss_fn();
    *v = saved - cfg.eps;
    const double fm = loss_fn();
    *v = saved;
    const double numeric = (fp - fm) / (2.0 * cfg.eps);
    const double analytic = params[p].grad[i];
    const double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-3});
    worst = std::max(worst, std::fabs(numeric - analytic) / denom);
  }
  return worst;
}

}  // namespace vain
