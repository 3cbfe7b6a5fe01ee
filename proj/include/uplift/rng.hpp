#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace uplift {

// Deterministic randomness built on std::mt19937_64, whose output sequence is
// fixed by the standard. std::shuffle and the distribution classes are
// implementation-defined, so the bounded draw and Fisher-Yates loop are
// spelled out here to keep seeded results portable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform draw from [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % bound + 1) % bound;
    std::uint64_t v = gen_();
    while (v > limit) v = gen_();
    return v % bound;
  }

  // Uniform double in [0, 1).
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (used by test fixtures).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace uplift
