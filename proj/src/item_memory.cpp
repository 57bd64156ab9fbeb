#include "syhd/item_memory.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace syhd {

namespace {
constexpr double kWidenEps = 1e-6;
}

Quantizer Quantizer::fit(const Matrix& x, int q) {
  if (q < 2) throw std::invalid_argument("quantizer needs q >= 2");
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("quantizer fit on empty matrix");
  Quantizer out;
  out.q = q;
  out.lo.assign(x.cols(), std::numeric_limits<double>::infinity());
  out.hi.assign(x.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out.lo[c] = std::min(out.lo[c], row[c]);
      out.hi[c] = std::max(out.hi[c], row[c]);
    }
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    if (out.hi[c] <= out.lo[c]) {
      out.widened_columns.push_back(c);
      out.lo[c] -= kWidenEps;
      out.hi[c] += kWidenEps;
    }
  }
  if (!out.widened_columns.empty()) {
    std::cerr << "warning: " << out.widened_columns.size()
              << " constant feature column(s) widened by +-" << kWidenEps
              << " (first: column " << out.widened_columns.front() << ")\n";
  }
  return out;
}

Quantizer Quantizer::uniform(std::size_t dim, int q, double lo, double hi) {
  if (q < 2) throw std::invalid_argument("quantizer needs q >= 2");
  if (!(hi > lo)) throw std::invalid_argument("uniform quantizer needs hi > lo");
  Quantizer out;
  out.q = q;
  out.lo.assign(dim, lo);
  out.hi.assign(dim, hi);
  return out;
}

std::vector<int> Quantizer::quantize(std::span<const double> x) const {
  if (!fitted()) throw std::logic_error("quantize before fit");
  if (x.size() != dim()) throw std::invalid_argument("quantize: feature count mismatch");
  std::vector<int> levels(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = std::clamp(x[j], lo[j], hi[j]);
    const int raw = 1 + static_cast<int>(std::floor(q * (v - lo[j]) / (hi[j] - lo[j])));
    levels[j] = std::clamp(raw, 1, q);
  }
  return levels;
}

std::vector<double> Quantizer::dequantize(std::span<const int> levels) const {
  if (!fitted()) throw std::logic_error("dequantize before fit");
  if (levels.size() != dim()) throw std::invalid_argument("dequantize: feature count mismatch");
  std::vector<double> x(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (levels[j] < 1 || levels[j] > q) {
      throw std::invalid_argument("dequantize: level " + std::to_string(levels[j]) +
                                  " outside [1, " + std::to_string(q) + "]");
    }
    x[j] = lo[j] + (levels[j] - 0.5) * (hi[j] - lo[j]) / q;
  }
  return x;
}

ItemMemory ItemMemory::generate(std::size_t dl, std::size_t dh, int q, std::uint64_t seed) {
  if (dl == 0) throw std::invalid_argument("item memory needs at least one feature");
  if (q < 2) throw std::invalid_argument("item memory needs q >= 2");
  if (static_cast<std::size_t>(q) > dh) {
    throw std::invalid_argument("q " + std::to_string(q) + " exceeds hypervector dim " +
                                std::to_string(dh));
  }
  ItemMemory mem;
  mem.seed_ = seed;
  mem.dh_ = dh;
  mem.q_ = q;
  SplitMix64 seed_rng(SplitMix64::derive(seed, kStreamFeatureSeeds));
  mem.feature_seeds_.reserve(dl);
  for (std::size_t j = 0; j < dl; ++j) {
    mem.feature_seeds_.push_back(Hypervector::random(dh, seed_rng));
  }
  SplitMix64 level_rng(SplitMix64::derive(seed, kStreamLevelTable));
  mem.level_table_ = generate_level_table(dh, q, level_rng);
  return mem;
}

void ItemMemory::set_quantizer(Quantizer q) {
  if (q.q != q_) throw std::invalid_argument("quantizer level count differs from item memory q");
  if (q.dim() != feature_count()) {
    throw std::invalid_argument("quantizer feature count differs from item memory");
  }
  quantizer_ = std::move(q);
}

void ItemMemory::set_uniform_range(double lo, double hi) {
  quantizer_ = Quantizer::uniform(feature_count(), q_, lo, hi);
}

Hypervector ItemMemory::encode(std::span<const int> levels) const {
  if (levels.size() != feature_count()) {
    throw std::invalid_argument("encode: expected " + std::to_string(feature_count()) +
                                " levels, got " + std::to_string(levels.size()));
  }
  MajorityAccumulator acc(dh_);
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (levels[j] < 1 || levels[j] > q_) {
      throw std::invalid_argument("encode: level " + std::to_string(levels[j]) + " outside [1, " +
                                  std::to_string(q_) + "]");
    }
    acc.add_bound(feature_seeds_[j], level_table_[static_cast<std::size_t>(levels[j] - 1)]);
  }
  return acc.majority();
}

Hypervector ItemMemory::encode_real(std::span<const double> x) const {
  return encode(quantizer_.quantize(x));
}

std::vector<int> ItemMemory::decode(const Hypervector& hv) const {
  if (hv.dim() != dh_) throw std::invalid_argument("decode: dimension mismatch");
  std::vector<int> levels(feature_count());
  for (std::size_t j = 0; j < feature_count(); ++j) {
    const Hypervector u = bind(hv, feature_seeds_[j]);
    std::size_t best_bits = hamming_bits(u, level_table_[0]);
    int best = 1;
    for (int k = 2; k <= q_; ++k) {
      const std::size_t bits = hamming_bits(u, level_table_[static_cast<std::size_t>(k - 1)]);
      if (bits < best_bits) {
        best_bits = bits;
        best = k;
      }
    }
    levels[j] = best;
  }
  return levels;
}

std::vector<double> ItemMemory::reconstruct(std::span<const double> x) const {
  return quantizer_.dequantize(decode(encode(quantizer_.quantize(x))));
}

ItemMemory ItemMemoryAccess::assemble(std::uint64_t seed, std::size_t dh, int q,
                                      std::vector<Hypervector> seeds,
                                      std::vector<Hypervector> levels, Quantizer quantizer) {
  ItemMemory mem;
  mem.seed_ = seed;
  mem.dh_ = dh;
  mem.q_ = q;
  mem.feature_seeds_ = std::move(seeds);
  mem.level_table_ = std::move(levels);
  mem.quantizer_ = std::move(quantizer);
  return mem;
}

std::pair<double, double> reconstruction_error(const Matrix& x, const ItemMemory& mem) {
  if (x.rows() == 0) throw std::invalid_argument("reconstruction_error on empty matrix");
  if (x.cols() != mem.feature_count()) {
    throw std::invalid_argument("reconstruction_error: feature count mismatch");
  }
  const Quantizer& quant = mem.quantizer();
  const std::size_t n = x.rows() * x.cols();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    const auto rec = mem.reconstruct(row);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double err = std::abs(rec[c] - row[c]) / (quant.hi[c] - quant.lo[c]);
      sum += err;
      sum_sq += err * err;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var)};
}

}  // namespace syhd
