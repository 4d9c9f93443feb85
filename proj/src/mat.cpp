#include "vain/mat.hpp"

#include <cmath>

namespace vain {

bool all_finite(const Mat& m) {
  for (double v : m.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const Mat& a, const Mat& b, const std::string& what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(what + ": shape mismatch " + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols));
  }
}

void require_cols(const Mat& m, int cols, const std::string& what) {
  if (m.cols != cols) {
    throw std::invalid_argument(what + ": expected " + std::to_string(cols) + " columns, got " +
                                std::to_string(m.cols));
  }
}

void require_finite(const Mat& m, const std::string& what) {
  if (!all_finite(m)) throw std::runtime_error(what + ": non-finite entries");
}

double exact_sum(std::span<const double> xs) {
  ExactAcc acc;
  for (double x : xs) acc.add(x);
  return acc.result();
}

}  // namespace vain
