#pragma once

#include <cstdint>
#include <random>

namespace lowercs {

/// SplitMix64 finalizer of (seed, stream): independent substream seeds for
/// trials, cells and test points.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// 64-bit Mersenne Twister with a platform-independent conversion to doubles
/// (the standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  std::uint64_t next_u64() noexcept { return engine_(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::mt19937_64 engine_;
};

}  // namespace lowercs
