#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace bohm {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                         std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The key is the run seed; the counter holds
/// the stream index, a sub-stream tag and the draw count, so every
/// (seed, stream, substream) triple yields an independent, reproducible
/// sequence regardless of which thread consumes it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

/// FNV-1a 64-bit hash; used to derive stream ids from labels and to
/// fingerprint configurations.
std::uint64_t fnv1a64(std::string_view text);

/// Mixes two 64-bit values into a well-distributed 64-bit value (splitmix64
/// finalizer over a combination).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace bohm
