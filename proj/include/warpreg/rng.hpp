#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace warpreg {

/// Deterministic random source with a pinned draw discipline so seeded runs
/// reproduce bit-for-bit across platforms: uniforms take the top 53 bits of
/// one mt19937_64 word, and each normal consumes exactly two uniforms
/// (Box-Muller, cosine branch, no cached spare).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace warpreg
