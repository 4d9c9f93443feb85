#pragma once

#include <cstdint>
#include <vector>

#include "vain/mat.hpp"

namespace vain {

// One instant of a multi-agent system: a fixed number of slots, each either an
// active agent (feature row) or masked out. Masked rows must be all-zero.
struct AgentFrame {
  Mat features;               // n_slots x feature_dim
  std::vector<uint8_t> mask;  // 1 = active

  int n_slots() const { return features.rows; }
  int feature_dim() const { return features.cols; }

  int n_active() const {
    int n = 0;
    for (uint8_t m : mask) n += m != 0;
    return n;
  }

  std::vector<int> active_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < n_slots(); ++i) {
      if (mask[i]) idx.push_back(i);
    }
    return idx;
  }

  void validate() const;

  static AgentFrame dense(Mat features);  // all slots active
};

}  // namespace vain
