#include "vain/losses.hpp"

#include <cmath>
#include <limits>

namespace vain {

namespace {

bool active(const std::vector<uint8_t>* mask, size_t i) { return !mask || (*mask)[i] != 0; }

double masked_max(const std::vector<double>& v, const std::vector<uint8_t>* mask) {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v.size(); ++i) {
    if (active(mask, i) && v[i] > m) m = v[i];
  }
  if (!std::isfinite(m) && m < 0) throw std::invalid_argument("softmax: all entries masked");
  return m;
}

}  // namespace

std::vector<double> softmax(const std::vector<double>& logits, const std::vector<uint8_t>* mask) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  if (mask && mask->size() != logits.size()) throw std::invalid_argument("softmax: mask size");
  const double mx = masked_max(logits, mask);
  std::vector<double> out(logits.size(), 0.0);
  ExactAcc denom;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (!active(mask, i)) continue;
    out[i] = std::exp(logits[i] - mx);
    denom.add(out[i]);
  }
  const double z = denom.result();
  for (size_t i = 0; i < logits.size(); ++i) {
    if (active(mask, i)) out[i] /= z;
  }
  return out;
}

LossGrad mse_loss(const Mat& pred, const Mat& target) {
  require_same_shape(pred, target, "mse_loss");
  if (pred.size() == 0) throw std::invalid_argument("mse_loss: empty input");
  LossGrad out;
  out.grad = Mat(pred.rows, pred.cols);
  const double scale = 1.0 / static_cast<double>(pred.size());
  double acc = 0.0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    acc += d * d;
    out.grad.data[i] = 2.0 * d * scale;
  }
  out.loss = acc * scale;
  return out;
}

LossGrad mse_loss_masked(const Mat& pred, const Mat& target, const std::vector<uint8_t>& mask) {
  require_same_shape(pred, target, "mse_loss");
  if (mask.size() != static_cast<size_t>(pred.rows)) {
    throw std::invalid_argument("mse_loss_masked: mask size");
  }
  int nact = 0;
  for (uint8_t m : mask) nact += m != 0;
  if (nact == 0) throw std::invalid_argument("mse_loss_masked: all rows masked");
  LossGrad out;
  out.grad = Mat(pred.rows, pred.cols);
  const double scale = 1.0 / (static_cast<double>(nact) * pred.cols);
  double acc = 0.0;
  for (int r = 0; r < pred.rows; ++r) {
    if (!mask[r]) continue;
    for (int c = 0; c < pred.cols; ++c) {
      const double d = pred(r, c) - target(r, c);
      acc += d * d;
      out.grad(r, c) = 2.0 * d * scale;
    }
  }
  out.loss = acc * scale;
  return out;
}

CeGrad cross_entropy_loss(const std::vector<double>& logits, int label,
                          const std::vector<uint8_t>* mask) {
  if (label < 0 || label >= static_cast<int>(logits.size())) {
    throw std::invalid_argument("cross_entropy_loss: label out of range");
  }
  if (mask && !(*mask)[label]) throw std::invalid_argument("cross_entropy_loss: masked label");
  const double mx = masked_max(logits, mask);
  ExactAcc denom;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (active(mask, i)) denom.add(std::exp(logits[i] - mx));
  }
  const double lse = std::log(denom.result()) + mx;
  CeGrad out;
  out.loss = lse - logits[label];
  out.grad.assign(logits.size(), 0.0);
  for (size_t i = 0; i < logits.size(); ++i) {
    if (active(mask, i)) out.grad[i] = std::exp(logits[i] - lse);
  }
  out.grad[label] -= 1.0;
  return out;
}

}  // namespace vain
