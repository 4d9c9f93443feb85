#include "vain/frame.hpp"

#include <stdexcept>

namespace vain {

void AgentFrame::validate() const {
  if (mask.size() != static_cast<size_t>(features.rows)) {
    throw std::invalid_argument("AgentFrame: mask size != rows");
  }
  if (n_active() < 1) throw std::invalid_argument("AgentFrame: no active agents");
  for (int r = 0; r < features.rows; ++r) {
    if (mask[r]) continue;
    for (int c = 0; c < features.cols; ++c) {
      if (features(r, c) != 0.0) {
        throw std::invalid_argument("AgentFrame: masked slot carries non-zero features");
      }
    }
  }
  require_finite(features, "AgentFrame.features");
}

AgentFrame AgentFrame::dense(Mat features) {
  AgentFrame f;
  f.mask.assign(features.rows, 1);
  f.features = std::move(features);
  return f;
}

}  // namespace vain
