#pragma once

#include <cstdint>
#include <random>

namespace detflow {

// Seeded uniform draws on top of mt19937_64. The raw engine output is fixed
// by the standard; the manual [0,1) mapping keeps results identical across
// standard-library implementations, which the byte-exact check suites rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Inclusive bounds. Spans here are tiny, so modulo bias is irrelevant.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace detflow
