#pragma once

#include <cstdint>
#include <random>

namespace geoscatter {

/// Seeded generator whose draws depend only on the seed (the mapping from
/// bits to doubles is fixed here rather than left to the standard library).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

} // namespace geoscatter
