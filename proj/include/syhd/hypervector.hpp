#pragma once

// Bit-packed binary hypervectors and the algebra on them: XOR binding,
// majority bundling, normalized Hamming distance, and level-table generation.
//
// Packing is little-endian words: bit k of the vector is bit (k % 64) of word
// k / 64. Serialized models depend on this layout.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "syhd/rng.hpp"

namespace syhd {

class Hypervector {
 public:
  static constexpr std::size_t kWordBits = 64;

  // Default-constructed vectors have dim 0 and act only as assignment targets.
  Hypervector() = default;

  explicit Hypervector(std::size_t dim);

  static Hypervector random(std::size_t dim, SplitMix64& rng);

  // Parses a string of '0'/'1'; character i becomes bit i.
  static Hypervector from_bits(std::string_view bits);
  std::string to_bits() const;

  std::size_t dim() const { return dim_; }

  bool bit(std::size_t index) const {
    return (words_[index / kWordBits] >> (index % kWordBits)) & 1ULL;
  }
  void set_bit(std::size_t index, bool value) {
    const std::uint64_t mask = 1ULL << (index % kWordBits);
    if (value) {
      words_[index / kWordBits] |= mask;
    } else {
      words_[index / kWordBits] &= ~mask;
    }
  }
  void flip_bit(std::size_t index) { words_[index / kWordBits] ^= 1ULL << (index % kWordBits); }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  static std::size_t word_count(std::size_t dim) { return (dim + kWordBits - 1) / kWordBits; }

  // Clears any stray bits beyond dim in the last word.
  void mask_tail();

  bool operator==(const Hypervector&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

// Element-wise XOR; self-inverse, so bind(bind(a,b),b) == a.
Hypervector bind(const Hypervector& a, const Hypervector& b);

// Per-position strict majority over a nonempty list; ties (even counts) go to 0.
Hypervector bundle(std::span<const Hypervector> vs);

// Number of differing positions.
std::size_t hamming_bits(const Hypervector& a, const Hypervector& b);

// Normalized Hamming distance in [0,1].
double hamming(const Hypervector& a, const Hypervector& b);

Hypervector complement(const Hypervector& a);

// Streaming majority counter. Per-position counts are kept as bit planes so
// adding a vector is word-parallel instead of bit-by-bit; majority extraction
// compares the planes against the threshold n/2 most-significant-plane first.
class MajorityAccumulator {
 public:
  explicit MajorityAccumulator(std::size_t dim);

  void add(const Hypervector& hv);
  // Accumulates a XOR b without materializing the bound vector.
  void add_bound(const Hypervector& a, const Hypervector& b);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }

  std::uint64_t count_at(std::size_t index) const;

  // Bit = count > n/2 (strict majority, ties to 0). Requires size() >= 1.
  Hypervector majority() const;

 private:
  void add_words(const std::uint64_t* carry_in);

  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<std::vector<std::uint64_t>> planes_;
  std::vector<std::uint64_t> scratch_;
};

// Level hypervectors: row 1 is random; each subsequent row flips exactly
// floor(dim/levels) bits of its predecessor, drawn from bits never flipped
// before, so Hamming(Q_i, Q_j) == |i-j| * floor(dim/levels) bits exactly.
// Requires 2 <= levels <= dim.
std::vector<Hypervector> generate_level_table(std::size_t dim, int levels, SplitMix64& rng);

inline std::size_t flips_per_level(std::size_t dim, int levels) {
  return dim / static_cast<std::size_t>(levels);
}

}  // namespace syhd
