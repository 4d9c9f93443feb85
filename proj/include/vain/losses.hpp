#pragma once

#include <cstdint>
#include <vector>

#include "vain/mat.hpp"

namespace vain {

// Masked softmax. Masked entries come out exactly 0; unmasked entries are
// positive and sum to 1 (max-subtracted for stability, exact-sum denominator).
// Throws if every entry is masked.
std::vector<double> softmax(const std::vector<double>& logits,
                            const std::vector<uint8_t>* mask = nullptr);

struct LossGrad {
  double loss = 0.0;
  Mat grad;
};

// Mean squared error over all entries; grad = 2 (pred - target) / numel.
LossGrad mse_loss(const Mat& pred, const Mat& target);

// Same, but restricted to rows with mask != 0. The mean runs over
// active rows x cols; masked rows get zero gradient.
LossGrad mse_loss_masked(const Mat& pred, const Mat& target, const std::vector<uint8_t>& mask);

struct CeGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// loss = -log softmax(logits)[label]; grad = softmax - onehot(label), masked
// entries zero. Computed through log-sum-exp so extreme logits stay finite.
CeGrad cross_entropy_loss(const std::vector<double>& logits, int label,
                          const std::vector<uint8_t>* mask = nullptr);

}  // namespace vain
