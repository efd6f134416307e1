#pragma once

#include <cstdint>
#include <random>

namespace adcons {

/// Seeded generator with portable real-valued draws.
///
/// std::uniform_real_distribution and std::normal_distribution are
/// implementation-defined; these conversions are not, so identical seeds give
/// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  /// Standard normal (Box-Muller, one value per call).
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adcons
