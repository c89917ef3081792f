#pragma once

#include <cstdint>

namespace twtsp {

/// SplitMix64 (Steele, Lea, Flood). The state advances by the golden-ratio
/// increment and each output is a fixed mix of the state, so the stream is
/// reproducible from the 64-bit seed in any language.
///
/// uniform(lo, hi) = lo + next() % (hi - lo + 1). The modulo bias is
/// accepted deliberately: it keeps reimplementations byte-identical.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi]; requires lo <= hi.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  /// True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return next() % den < num; }

  /// Child generator for an independent sub-stream.
  SplitMix64 split() { return SplitMix64(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace twtsp
