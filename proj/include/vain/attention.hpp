#pragma once

#include <cstdint>
#include <vector>

#include "vain/mat.hpp"

namespace vain {

enum class Kernel { Softmax, Unnormalized };

struct PoolResult {
  Mat pooled;  // n x comm_dim
  Mat w;       // n x n attention weights, diagonal 0, masked rows/cols 0
};

// Attention pooling: w_{i,j} from squared distances between attention rows,
// P_i = sum_j w_{i,j} e^c_j over active j.
//
// Softmax kernel: per active row i, softmax over active j (self included) of
// -|a_i - a_j|^2, then the self weight is zeroed with no renormalization.
// Unnormalized kernel: w_{i,j} = exp(-|a_i - a_j|^2) for j != i (the self term
// cancels exactly against the delta).
//
// A single active agent pools to the zero vector. All cross-agent reductions
// use exact sums, so outputs are bitwise invariant under agent permutation.
PoolResult attention_pool(const Mat& ecomm, const Mat& attn, const std::vector<uint8_t>& mask,
                          Kernel kernel);

struct PoolBackward {
  Mat grad_ecomm;
  Mat grad_attn;
};

PoolBackward attention_pool_backward(const Mat& ecomm, const Mat& attn,
                                     const std::vector<uint8_t>& mask, Kernel kernel, const Mat& w,
                                     const Mat& grad_pooled);

// Mean over active j != i of e^c_j; a single active agent pools to zero.
Mat commnet_pool(const Mat& ecomm, const std::vector<uint8_t>& mask);
Mat commnet_pool_backward(const std::vector<uint8_t>& mask, const Mat& grad_pooled);

}  // namespace vain
