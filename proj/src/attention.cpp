#include "vain/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace vain {

namespace {

std::vector<int> active_of(const std::vector<uint8_t>& mask) {
  std::vector<int> idx;
  for (size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

double sq_dist(const Mat& attn, int i, int j) {
  const double* ai = attn.row(i);
  const double* aj = attn.row(j);
  double acc = 0.0;
  for (int k = 0; k < attn.cols; ++k) {
    const double d = ai[k] - aj[k];
    acc += d * d;
  }
  return acc;
}

}  // namespace

PoolResult attention_pool(const Mat& ecomm, const Mat& attn, const std::vector<uint8_t>& mask,
                          Kernel kernel) {
  if (ecomm.rows != attn.rows) throw std::invalid_argument("attention_pool: row mismatch");
  if (mask.size() != static_cast<size_t>(ecomm.rows)) {
    throw std::invalid_argument("attention_pool: mask size");
  }
  const int n = ecomm.rows, c = ecomm.cols;
  PoolResult out;
  out.pooled = Mat(n, c);
  out.w = Mat(n, n);
  const std::vector<int> act = active_of(mask);
  if (act.size() <= 1) return out;

  // exp(-|a_i - a_j|^2): arguments are <= 0 with the self term at exactly 0,
  // so the softmax needs no max shift and the denominator is >= 1.
  for (int i : act) {
    if (kernel == Kernel::Softmax) {
      ExactAcc denom;
      for (int j : act) denom.add(j == i ? 1.0 : std::exp(-sq_dist(attn, i, j)));
      const double z = denom.result();
      for (int j : act) {
        if (j == i) continue;  // Eq self weight zeroed, no renormalization
        out.w(i, j) = std::exp(-sq_dist(attn, i, j)) / z;
      }
    } else {
      for (int j : act) {
        if (j == i) continue;
        out.w(i, j) = std::exp(-sq_dist(attn, i, j));
      }
    }
  }
  for (int i : act) {
    for (int k = 0; k < c; ++k) {
      ExactAcc acc;
      for (int j : act) {
        if (j == i) continue;
        acc.add(out.w(i, j) * ecomm(j, k));
      }
      out.pooled(i, k) = acc.result();
    }
  }
  return out;
}

PoolBackward attention_pool_backward(const Mat& ecomm, const Mat& attn,
                                     const std::vector<uint8_t>& mask, Kernel kernel, const Mat& w,
                                     const Mat& grad_pooled) {
  const int n = ecomm.rows, c = ecomm.cols, a = attn.cols;
  PoolBackward out;
  out.grad_ecomm = Mat(n, c);
  out.grad_attn = Mat(n, a);
  const std::vector<int> act = active_of(mask);
  if (act.size() <= 1) return out;

  // d pooled_i / d e_j = w_ij
  for (int j : act) {
    for (int k = 0; k < c; ++k) {
      double acc = 0.0;
      for (int i : act) acc += w(i, j) * grad_pooled(i, k);
      out.grad_ecomm(j, k) = acc;
    }
  }

  // Gradient wrt the kernel weights, then down to the attention vectors.
  Mat gw(n, n);
  for (int i : act) {
    for (int j : act) {
      if (j == i) continue;
      double acc = 0.0;
      for (int k = 0; k < c; ++k) acc += grad_pooled(i, k) * ecomm(j, k);
      gw(i, j) = acc;
    }
  }

  Mat gd(n, n);  // gradient wrt d_ij = -|a_i - a_j|^2
  if (kernel == Kernel::Softmax) {
    for (int i : act) {
      // Softmax ran over all active j including self; recover the self weight
      // from the row sum (it was zeroed afterwards, so its output grad is 0).
      double row_sum = 0.0, t = 0.0;
      for (int j : act) {
        if (j == i) continue;
        row_sum += w(i, j);
        t += w(i, j) * gw(i, j);
      }
      const double s_ii = 1.0 - row_sum;
      for (int j : act) {
        const double s = (j == i) ? s_ii : w(i, j);
        const double g = (j == i) ? 0.0 : gw(i, j);
        gd(i, j) = s * (g - t);
      }
    }
  } else {
    for (int i : act) {
      for (int j : act) {
        if (j == i) continue;
        gd(i, j) = w(i, j) * gw(i, j);
      }
    }
  }

  for (int i : act) {
    for (int j : act) {
      if (j == i) continue;  // the self distance is identically zero
      const double g = gd(i, j);
      if (g == 0.0) continue;
      for (int k = 0; k < a; ++k) {
        const double diff = attn(i, k) - attn(j, k);
        out.grad_attn(i, k) += g * (-2.0 * diff);
        out.grad_attn(j, k) += g * (2.0 * diff);
      }
    }
  }
  return out;
}

Mat commnet_pool(const Mat& ecomm, const std::vector<uint8_t>& mask) {
  if (mask.size() != static_cast<size_t>(ecomm.rows)) {
    throw std::invalid_argument("commnet_pool: mask size");
  }
  const int n = ecomm.rows, c = ecomm.cols;
  Mat pooled(n, c);
  const std::vector<int> act = active_of(mask);
  if (act.size() <= 1) return pooled;
  const double inv = 1.0 / static_cast<double>(act.size() - 1);
  for (int i : act) {
    for (int k = 0; k < c; ++k) {
      ExactAcc acc;
      for (int j : act) {
        if (j == i) continue;
        acc.add(ecomm(j, k));
      }
      pooled(i, k) = acc.result() * inv;
    }
  }
  return pooled;
}

Mat commnet_pool_backward(const std::vector<uint8_t>& mask, const Mat& grad_pooled) {
  const int n = grad_pooled.rows, c = grad_pooled.cols;
  Mat grad_ecomm(n, c);
  const std::vector<int> act = active_of(mask);
  if (act.size() <= 1) return grad_ecomm;
  const double inv = 1.0 / static_cast<double>(act.size() - 1);
  for (int j : act) {
    for (int k = 0; k < c; ++k) {
      double acc = 0.0;
      for (int i : act) {
        if (i == j) continue;
        acc += grad_pooled(i, k);
      }
      grad_ecomm(j, k) = acc * inv;
    }
  }
  return grad_ecomm;
}

}  // namespace vain
