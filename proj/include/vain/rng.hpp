#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace vain {

using Rng = std::mt19937_64;

// Hand-rolled draws instead of <random> distributions: the standard leaves
// distribution algorithms implementation-defined, and datasets must be
// byte-identical for a given seed.
inline double next_unit(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double next_uniform(Rng& g, double lo, double hi) { return lo + (hi - lo) * next_unit(g); }

inline uint64_t next_below(Rng& g, uint64_t n) { return g() % n; }

template <typename T>
void shuffle_inplace(std::vector<T>& v, Rng& g) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(next_below(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace vain
