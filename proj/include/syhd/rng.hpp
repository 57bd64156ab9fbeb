#pragma once

// Deterministic 64-bit PRNG used everywhere randomness is needed.
// The generator is named and versioned because model files record the seed and
// promise bit-exact regeneration of item memories on any machine; changing the
// sequence is a format break, not a tweak.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace syhd {

inline constexpr const char* kRngName = "splitmix64";
inline constexpr std::uint32_t kRngVersion = 1;

// Fixed stream tags for deriving child seeds from a master seed.
enum RngStream : std::uint64_t {
  kStreamFeatureSeeds = 1,
  kStreamLevelTable = 2,
  kStreamWeights = 3,
  kStreamShuffle = 4,
  kStreamSplit = 5,
  kStreamData = 6,
  kStreamRepetition = 0x100,  // repetition r uses kStreamRepetition + r
};

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo,hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased uniform in [0,bound); bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Child seed for a named stream: the splitmix64 output of state seed+stream
  // steps ahead. Pure function of (seed, stream); this is the splitting rule
  // recorded alongside experiment results.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed + stream * 0x9e3779b97f4a7c15ULL);
    return g.next();
  }

  SplitMix64 split(std::uint64_t stream) const { return SplitMix64(derive(state_, stream)); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates with our own generator so shuffles are identical on every
// platform (std::shuffle's use of the URBG is implementation-defined).
template <typename T>
void shuffle(std::vector<T>& values, SplitMix64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace syhd
