#pragma once

// Item memory: per-feature seed hypervectors S, per-level hypervectors Q, and
// the uniform quantizer that maps real features onto levels. Together these
// implement the encoder (quantize, bind, bundle) and decoder (unbind, cleanup
// against Q) used both by the HD classifier and by the NN codec layer.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "syhd/hypervector.hpp"
#include "syhd/matrix.hpp"
#include "syhd/rng.hpp"

namespace syhd {

// Per-feature uniform bins over [lo_j, hi_j] with q levels.
struct Quantizer {
  int q = 0;
  std::vector<double> lo;
  std::vector<double> hi;
  // Columns whose min == max before widening by +-1e-6.
  std::vector<std::size_t> widened_columns;

  // Column min/max over X. Constant columns are widened and a single warning
  // line goes to stderr; the indices are kept for inspection.
  static Quantizer fit(const Matrix& x, int q);

  // Identical range [lo, hi] for every feature; used by the codec, whose
  // range [0, alpha] is not data-dependent.
  static Quantizer uniform(std::size_t dim, int q, double lo, double hi);

  std::size_t dim() const { return lo.size(); }
  bool fitted() const { return q >= 2 && !lo.empty(); }

  // level_j = 1 + floor(q * (clamp(x_j) - lo_j) / (hi_j - lo_j)), clamped to
  // [1, q] so x_j == hi_j lands in the top bin.
  std::vector<int> quantize(std::span<const double> x) const;

  // Bin midpoint: lo_j + (level_j - 0.5) * (hi_j - lo_j) / q.
  std::vector<double> dequantize(std::span<const int> levels) const;

  bool operator==(const Quantizer&) const = default;
};

class ItemMemory {
 public:
  ItemMemory() = default;

  // Regenerating with the same (dl, dh, q, seed) is bit-exact: S and Q come
  // from fixed streams split off the seed.
  static ItemMemory generate(std::size_t dl, std::size_t dh, int q, std::uint64_t seed);

  std::size_t feature_count() const { return feature_seeds_.size(); }
  std::size_t dim() const { return dh_; }
  int levels() const { return q_; }
  std::size_t flip_count() const { return flips_per_level(dh_, q_); }
  std::uint64_t seed() const { return seed_; }

  const std::vector<Hypervector>& feature_seeds() const { return feature_seeds_; }
  const std::vector<Hypervector>& level_table() const { return level_table_; }
  const Quantizer& quantizer() const { return quantizer_; }
  bool has_quantizer() const { return quantizer_.fitted(); }

  void set_quantizer(Quantizer q);
  // Rebuilds the quantizer as uniform [lo, hi] over all features (codec use).
  void set_uniform_range(double lo, double hi);

  // bundle over j of bind(S_j, Q[level_j]).
  Hypervector encode(std::span<const int> levels) const;
  Hypervector encode_real(std::span<const double> x) const;

  // Per feature j: cleanup of bind(hv, S_j) against Q, ties to the lowest
  // level.
  std::vector<int> decode(const Hypervector& hv) const;

  // Reconstructs hv through quantize -> encode -> decode -> dequantize.
  std::vector<double> reconstruct(std::span<const double> x) const;

  bool operator==(const ItemMemory&) const = default;

 private:
  std::uint64_t seed_ = 0;
  std::size_t dh_ = 0;
  int q_ = 0;
  std::vector<Hypervector> feature_seeds_;
  std::vector<Hypervector> level_table_;
  Quantizer quantizer_;

  friend struct ItemMemoryAccess;
};

// Grants model deserialization field-level access without widening the
// public construction surface.
struct ItemMemoryAccess {
  static ItemMemory assemble(std::uint64_t seed, std::size_t dh, int q,
                             std::vector<Hypervector> seeds, std::vector<Hypervector> levels,
                             Quantizer quantizer);
};

// Mean and population standard deviation of the per-entry normalized
// reconstruction error |reconstruct(x)_j - x_j| / (hi_j - lo_j) over all
// n * d entries of X.
std::pair<double, double> reconstruction_error(const Matrix& x, const ItemMemory& mem);

}  // namespace syhd
