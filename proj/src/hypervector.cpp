#include "syhd/hypervector.hpp"

#include <bit>
#include <stdexcept>

namespace syhd {

namespace {

void require_same_dim(const Hypervector& a, const Hypervector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("hypervector dimension mismatch: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

Hypervector::Hypervector(std::size_t dim) : dim_(dim), words_(word_count(dim), 0) {
  if (dim == 0) throw std::invalid_argument("hypervector dimension must be >= 1");
}

Hypervector Hypervector::random(std::size_t dim, SplitMix64& rng) {
  Hypervector hv(dim);
  for (auto& w : hv.words_) w = rng.next();
  hv.mask_tail();
  return hv;
}

Hypervector Hypervector::from_bits(std::string_view bits) {
  Hypervector hv(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw std::invalid_argument("from_bits expects only '0'/'1' characters");
    }
    hv.set_bit(i, bits[i] == '1');
  }
  return hv;
}

std::string Hypervector::to_bits() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if (bit(i)) s[i] = '1';
  }
  return s;
}

void Hypervector::mask_tail() {
  const std::size_t excess = words_.size() * kWordBits - dim_;
  if (excess > 0) words_.back() &= ~0ULL >> excess;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  Hypervector out(a.dim());
  auto wa = a.words();
  auto wb = b.words();
  auto wo = out.words();
  for (std::size_t i = 0; i < wo.size(); ++i) wo[i] = wa[i] ^ wb[i];
  return out;
}

Hypervector bundle(std::span<const Hypervector> vs) {
  if (vs.empty()) throw std::invalid_argument("bundle requires a nonempty list");
  MajorityAccumulator acc(vs.front().dim());
  for (const auto& hv : vs) acc.add(hv);
  return acc.majority();
}

std::size_t hamming_bits(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  auto wa = a.words();
  auto wb = b.words();
  std::size_t total = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    total += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return total;
}

double hamming(const Hypervector& a, const Hypervector& b) {
  return static_cast<double>(hamming_bits(a, b)) / static_cast<double>(a.dim());
}

Hypervector complement(const Hypervector& a) {
  Hypervector out(a.dim());
  auto wa = a.words();
  auto wo = out.words();
  for (std::size_t i = 0; i < wo.size(); ++i) wo[i] = ~wa[i];
  out.mask_tail();
  return out;
}

MajorityAccumulator::MajorityAccumulator(std::size_t dim)
    : dim_(dim), scratch_(Hypervector::word_count(dim), 0) {
  if (dim == 0) throw std::invalid_argument("accumulator dimension must be >= 1");
}

void MajorityAccumulator::add_words(const std::uint64_t* carry_in) {
  const std::size_t nwords = scratch_.size();
  std::uint64_t* carry = scratch_.data();
  if (carry != carry_in) {
    for (std::size_t w = 0; w < nwords; ++w) carry[w] = carry_in[w];
  }
  for (auto& plane : planes_) {
    std::uint64_t pending = 0;
    std::uint64_t* p = plane.data();
    for (std::size_t w = 0; w < nwords; ++w) {
      const std::uint64_t sum = p[w] ^ carry[w];
      carry[w] &= p[w];
      p[w] = sum;
      pending |= carry[w];
    }
    if (pending == 0) {
      ++count_;
      return;
    }
  }
  planes_.emplace_back(carry, carry + nwords);
  ++count_;
}

void MajorityAccumulator::add(const Hypervector& hv) {
  if (hv.dim() != dim_) throw std::invalid_argument("accumulator/hypervector dimension mismatch");
  add_words(hv.words().data());
}

void MajorityAccumulator::add_bound(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  if (a.dim() != dim_) throw std::invalid_argument("accumulator/hypervector dimension mismatch");
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t w = 0; w < scratch_.size(); ++w) scratch_[w] = wa[w] ^ wb[w];
  add_words(scratch_.data());
}

std::uint64_t MajorityAccumulator::count_at(std::size_t index) const {
  const std::size_t w = index / Hypervector::kWordBits;
  const std::size_t b = index % Hypervector::kWordBits;
  std::uint64_t value = 0;
  for (std::size_t plane = 0; plane < planes_.size(); ++plane) {
    value |= ((planes_[plane][w] >> b) & 1ULL) << plane;
  }
  return value;
}

Hypervector MajorityAccumulator::majority() const {
  if (count_ == 0) throw std::invalid_argument("majority of an empty accumulator");
  const std::uint64_t threshold = count_ / 2;  // bit = count > threshold
  // The comparison must cover every significant bit of the threshold, not just
  // the planes that carries actually created: when all per-position counts are
  // small the stored planes can be narrower than the threshold, and the
  // missing high planes read as zero.
  std::size_t top = planes_.size();
  const auto need = static_cast<std::size_t>(std::bit_width(threshold));
  if (need > top) top = need;
  Hypervector out(dim_);
  auto wo = out.words();
  for (std::size_t w = 0; w < wo.size(); ++w) {
    std::uint64_t gt = 0;
    std::uint64_t eq = ~0ULL;
    for (std::size_t plane = top; plane-- > 0;) {
      const std::uint64_t pbit = plane < planes_.size() ? planes_[plane][w] : 0ULL;
      const std::uint64_t tbit = (threshold >> plane) & 1ULL ? ~0ULL : 0ULL;
      gt |= eq & pbit & ~tbit;
      eq &= ~(pbit ^ tbit);
    }
    wo[w] = gt;
  }
  out.mask_tail();
  return out;
}

std::vector<Hypervector> generate_level_table(std::size_t dim, int levels, SplitMix64& rng) {
  if (levels < 2) throw std::invalid_argument("level table requires at least 2 levels");
  if (static_cast<std::size_t>(levels) > dim) {
    throw std::invalid_argument("level count " + std::to_string(levels) + " exceeds dimension " +
                                std::to_string(dim) + " (no bits left to flip)");
  }
  const std::size_t flips = flips_per_level(dim, levels);
  std::vector<Hypervector> table;
  table.reserve(static_cast<std::size_t>(levels));
  table.push_back(Hypervector::random(dim, rng));

  // Pool of never-flipped bit positions; each level consumes `flips` of them.
  std::vector<std::uint32_t> pool(dim);
  for (std::size_t i = 0; i < dim; ++i) pool[i] = static_cast<std::uint32_t>(i);

  for (int level = 1; level < levels; ++level) {
    Hypervector next = table.back();
    for (std::size_t t = 0; t < flips; ++t) {
      const std::size_t j = t + static_cast<std::size_t>(rng.next_below(pool.size() - t));
      std::swap(pool[t], pool[j]);
      next.flip_bit(pool[t]);
    }
    pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(flips));
    table.push_back(std::move(next));
  }
  return table;
}

}  // namespace syhd
