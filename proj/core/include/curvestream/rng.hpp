#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace curvestream {

// Seeded generator with a fully specified output sequence so that streams
// reproduce across platforms and languages:
//   engine   std::mt19937_64 (standardized), seeded with the 64-bit seed
//   uniform  (next() >> 11) * 2^-53, in [0, 1)
//   normal   Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2); one normal per
//            pair of uniforms, no caching
//   index    floor(uniform * n)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t index(std::uint64_t n) {
    const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace curvestream
