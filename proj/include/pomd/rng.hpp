#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace pomd {

/// SplitMix64 finalizer; the core mixing step of the counter-based generator.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based splittable generator. Each instance owns a key and a
/// counter; output i is mix64(key + GOLDEN * i), i.e. a SplitMix64 stream
/// keyed by the split path. split(stream) derives an independent stream
/// whose outputs never depend on how much the parent has been consumed,
/// so environment generation and episode sampling stay decoupled.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  SplitRng split(std::uint64_t stream) const {
    SplitRng child;
    child.key_ = mix64(key_ ^ mix64(stream ^ 0xbb67ae8584caa73bULL));
    return child;
  }

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be positive.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n)) >> 64));
  }

  /// Samples an index from a probability row via one uniform draw and a
  /// cumulative scan. Falls back to the last positive entry if rounding
  /// pushes the draw past the total mass.
  int sample_discrete(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("sample_discrete: empty row");
    const double u = uniform01();
    double acc = 0.0;
    int last_positive = -1;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] > 0.0) last_positive = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    if (last_positive < 0) throw std::invalid_argument("sample_discrete: all-zero row");
    return last_positive;
  }

 private:
  SplitRng() = default;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Stream labels so distinct consumers of one seed never collide.
namespace rng_stream {
inline constexpr std::uint64_t kEnvGeneration = 1;
inline constexpr std::uint64_t kSchedule = 2;
inline constexpr std::uint64_t kEpisodes = 3;
inline constexpr std::uint64_t kMonteCarlo = 4;
}  // namespace rng_stream

}  // namespace pomd
