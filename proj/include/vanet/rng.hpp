#pragma once

#include <cstdint>

namespace vanet {

/// Counter-based generator: the draw for (seed, trial, link, step) is a pure
/// function of those four values, so trials can run in any order on any
/// number of threads and still reproduce bit-identical traces.
///
/// Each (seed, trial, link) stream is a SplitMix64 sequence indexed by step.
class CounterRng {
public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t link) noexcept
      : key_(mix(mix(mix(seed) ^ (trial * 0xd1b54a32d192ed03ULL)) ^
                 (link * 0x8cb92ba72f3d8dd7ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t step) const noexcept {
    return mix(key_ + (step + 1) * kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t step) const noexcept {
    return static_cast<double>(bits(step) >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t key_;
};

}  // namespace vanet
