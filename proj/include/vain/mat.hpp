#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vain {

// Dense row-major matrix of 64-bit floats.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c) {
    if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative shape");
    data.assign(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0);
  }

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return data.size(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  void zero() { fill(0.0); }
};

bool all_finite(const Mat& m);
void require_same_shape(const Mat& a, const Mat& b, const std::string& what);
void require_cols(const Mat& m, int cols, const std::string& what);
void require_finite(const Mat& m, const std::string& what);

// Exact accumulator: keeps a non-overlapping expansion of partial sums, so the
// final result is the correctly rounded sum of all inputs regardless of the
// order they were added in. Used wherever a reduction runs across agents, so
// that permuting agents cannot change any forward output bit.
class ExactAcc {
 public:
  void add(double x) {
    size_t i = 0;
    for (size_t j = 0; j < n_; ++j) {
      double y = p_[j];
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) p_[i++] = lo;
      x = hi;
    }
    if (i >= kMax) throw std::runtime_error("ExactAcc: partials overflow");
    p_[i++] = x;
    n_ = i;
  }

  double result() const {
    if (n_ == 0) return 0.0;
    size_t n = n_;
    double hi = p_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = p_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // Round half to even: nudge hi when the remainder and the next partial
    // agree in sign.
    if (n > 0 && ((lo < 0.0 && p_[n - 1] < 0.0) || (lo > 0.0 && p_[n - 1] > 0.0))) {
      const double y2 = lo * 2.0;
      const double x2 = hi + y2;
      if (y2 == x2 - hi) hi = x2;
    }
    return hi;
  }

  void reset() { n_ = 0; }

 private:
  // Partials are pairwise non-overlapping, so their count is bounded by the
  // double exponent range divided by the mantissa width (~40).
  static constexpr size_t kMax = 48;
  double p_[kMax];
  size_t n_ = 0;
};

double exact_sum(std::span<const double> xs);

}  // namespace vain
