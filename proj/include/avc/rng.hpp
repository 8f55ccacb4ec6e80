#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace avc {

// splitmix64 finalizer; per-trial seeds are mix_seed(master, trial).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Uniform double in [0,1) from the top 53 bits; avoids library-specific
// distribution implementations so streams are portable.
inline double uniform01(Rng& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline int uniform_index(Rng& g, int n) {
  return static_cast<int>(uniform01(g) * n);
}

inline int sample_index(Rng& g, const std::vector<double>& pmf) {
  double r = uniform01(g), acc = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (r < acc) return static_cast<int>(i);
  }
  for (std::size_t i = pmf.size(); i-- > 0;)
    if (pmf[i] > 0) return static_cast<int>(i);
  return 0;
}

template <class T>
void shuffle_in_place(Rng& g, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform01(g) * i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace avc
