#pragma once

#include <cmath>
#include <cstdint>

#include "inrbench/tensor.hpp"

namespace inrb {

// Deterministic RNG with hand-rolled distributions so that streams are
// bit-identical across platforms and standard library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  // splitmix64
  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one value per call, cache the pair.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  int64_t uniform_int(int64_t n) {  // [0, n)
    return static_cast<int64_t>(next_u64() % static_cast<uint64_t>(n));
  }

  Tensor normal_tensor(std::vector<int64_t> shape, double mean, double stddev) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = normal(mean, stddev);
    return t;
  }

  Tensor uniform_tensor(std::vector<int64_t> shape, double lo, double hi) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = uniform(lo, hi);
    return t;
  }

 private:
  uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Stable seed derivation for independent sub-streams.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace inrb
