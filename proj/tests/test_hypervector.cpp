#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "syhd/hypervector.hpp"
#include "syhd/rng.hpp"

using syhd::bind;
using syhd::bundle;
using syhd::complement;
using syhd::generate_level_table;
using syhd::hamming;
using syhd::hamming_bits;
using syhd::Hypervector;
using syhd::MajorityAccumulator;
using syhd::SplitMix64;

namespace {

Hypervector from_u64(std::size_t dim, std::uint64_t bits) {
  Hypervector hv(dim);
  for (std::size_t i = 0; i < dim; ++i) hv.set_bit(i, (bits >> i) & 1ULL);
  return hv;
}

// Reference implementations, one bit at a time.
Hypervector naive_bind(const Hypervector& a, const Hypervector& b) {
  Hypervector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out.set_bit(i, a.bit(i) != b.bit(i));
  return out;
}

std::size_t naive_hamming(const Hypervector& a, const Hypervector& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) n += a.bit(i) != b.bit(i);
  return n;
}

Hypervector naive_bundle(const std::vector<Hypervector>& vs) {
  Hypervector out(vs.front().dim());
  for (std::size_t i = 0; i < out.dim(); ++i) {
    std::size_t ones = 0;
    for (const auto& hv : vs) ones += hv.bit(i);
    out.set_bit(i, 2 * ones > vs.size());
  }
  return out;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference sequence") {
  CHECK(std::string(syhd::kRngName) == "splitmix64");
  CHECK(syhd::kRngVersion == 1);

  SplitMix64 rng0(0);
  CHECK(rng0.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng0.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng0.next() == 0x06c45d188009454fULL);

  SplitMix64 rng42(42);
  CHECK(rng42.next() == 0xbdd732262feb6e95ULL);
  CHECK(rng42.next() == 0x28efe333b266f103ULL);

  CHECK(SplitMix64::derive(42, 3) == 0x581ce1ff0e4ae394ULL);
  CHECK(SplitMix64::derive(42, 3) != SplitMix64::derive(42, 4));
  CHECK(SplitMix64::derive(42, 3) != SplitMix64::derive(43, 3));
}

TEST_CASE("splitmix64 derived draws stay in range") {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.next_double(-2.5, 7.5);
    CHECK(d >= -2.5);
    CHECK(d < 7.5);
  }
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 1000; ++i) seen[rng.next_below(5)]++;
  CHECK(seen.size() == 5);
  for (const auto& [value, count] : seen) {
    CHECK(value < 5);
    CHECK(count > 100);
  }
}

TEST_CASE("fisher-yates shuffle is a seeded permutation") {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  std::vector<int> a = v, b = v;
  SplitMix64 r1(9), r2(9), r3(10);
  syhd::shuffle(a, r1);
  syhd::shuffle(b, r2);
  CHECK(a == b);
  CHECK(a != v);
  std::vector<int> c = v;
  syhd::shuffle(c, r3);
  CHECK(c != a);
  std::sort(a.begin(), a.end());
  CHECK(a == v);
}

TEST_CASE("hypervector construction, bit access, round trip") {
  Hypervector hv(130);
  CHECK(hv.dim() == 130);
  CHECK(hv.words().size() == 3);
  for (std::size_t i = 0; i < 130; ++i) CHECK_FALSE(hv.bit(i));

  hv.set_bit(0, true);
  hv.set_bit(64, true);
  hv.set_bit(129, true);
  CHECK(hv.bit(0));
  CHECK(hv.bit(64));
  CHECK(hv.bit(129));
  CHECK_FALSE(hv.bit(1));
  hv.flip_bit(64);
  CHECK_FALSE(hv.bit(64));

  const std::string bits = hv.to_bits();
  CHECK(bits.size() == 130);
  CHECK(Hypervector::from_bits(bits) == hv);

  CHECK(Hypervector::from_bits("0110").to_bits() == "0110");
  CHECK_THROWS_AS(Hypervector(0), std::invalid_argument);
  CHECK_THROWS_AS(Hypervector::from_bits("01x1"), std::invalid_argument);
}

TEST_CASE("random hypervectors are deterministic and tail-masked") {
  SplitMix64 r1(5), r2(5), r3(6);
  const auto a = Hypervector::random(70, r1);
  const auto b = Hypervector::random(70, r2);
  const auto c = Hypervector::random(70, r3);
  CHECK(a == b);
  CHECK(a != c);
  CHECK((a.words().back() >> 6) == 0);  // bits 70..127 must be clear

  // Density sanity: a fair coin on 4096 bits stays well inside [0.4, 0.6].
  SplitMix64 r4(7);
  const auto big = Hypervector::random(4096, r4);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < big.dim(); ++i) ones += big.bit(i);
  CHECK(ones > 4096 * 0.4);
  CHECK(ones < 4096 * 0.6);
}

TEST_CASE("bind matches the per-bit oracle exhaustively for dim <= 8") {
  for (std::size_t dim : {1u, 3u, 8u}) {
    const std::uint64_t limit = 1ULL << dim;
    for (std::uint64_t x = 0; x < limit; ++x) {
      for (std::uint64_t y = 0; y < limit; ++y) {
        const auto a = from_u64(dim, x);
        const auto b = from_u64(dim, y);
        const auto bound = bind(a, b);
        REQUIRE(bound == naive_bind(a, b));
        REQUIRE(hamming_bits(a, b) == naive_hamming(a, b));
        REQUIRE(bind(bound, b) == a);  // self-inverse
        REQUIRE(bind(a, b) == bind(b, a));
      }
    }
  }
}

TEST_CASE("bind algebra on random vectors") {
  SplitMix64 rng(11);
  for (int it = 0; it < 20; ++it) {
    const std::size_t dim = 64 * (it % 3 + 1) + (it % 7);
    const auto a = Hypervector::random(dim, rng);
    const auto b = Hypervector::random(dim, rng);
    const auto c = Hypervector::random(dim, rng);
    CHECK(bind(a, a) == Hypervector(dim));
    CHECK(bind(bind(a, b), c) == bind(a, bind(b, c)));
    CHECK(bind(a, Hypervector(dim)) == a);
    // Binding by a common vector preserves distances.
    CHECK(hamming_bits(bind(a, c), bind(b, c)) == hamming_bits(a, b));
  }
  CHECK_THROWS_AS(bind(Hypervector(8), Hypervector(9)), std::invalid_argument);
}

TEST_CASE("hamming distance properties") {
  SplitMix64 rng(13);
  const auto a = Hypervector::random(200, rng);
  const auto b = Hypervector::random(200, rng);
  const auto c = Hypervector::random(200, rng);
  CHECK(hamming_bits(a, a) == 0);
  CHECK(hamming(a, a) == 0.0);
  CHECK(hamming_bits(a, b) == hamming_bits(b, a));
  CHECK(hamming_bits(a, c) <= hamming_bits(a, b) + hamming_bits(b, c));
  CHECK(hamming(a, complement(a)) == 1.0);
  CHECK(hamming(a, b) == doctest::Approx(hamming_bits(a, b) / 200.0));
  CHECK_THROWS_AS(hamming_bits(a, Hypervector(100)), std::invalid_argument);
}

TEST_CASE("bundle majority on hand-worked cases") {
  const std::vector<Hypervector> tri = {Hypervector::from_bits("1100"),
                                        Hypervector::from_bits("1010"),
                                        Hypervector::from_bits("1001")};
  CHECK(bundle(tri).to_bits() == "1000");

  // Even count: exact ties resolve to 0.
  const std::vector<Hypervector> tie = {Hypervector::from_bits("10"), Hypervector::from_bits("01")};
  CHECK(bundle(tie).to_bits() == "00");

  const std::vector<Hypervector> single = {Hypervector::from_bits("1011")};
  CHECK(bundle(single) == single[0]);

  const std::vector<Hypervector> pair = {Hypervector::from_bits("1101"),
                                         Hypervector::from_bits("1011")};
  CHECK(bundle(pair).to_bits() == "1001");  // n=2 majority is AND

  CHECK_THROWS_AS(bundle({}), std::invalid_argument);
  const std::vector<Hypervector> mixed = {Hypervector(4), Hypervector(5)};
  CHECK_THROWS_AS(bundle(mixed), std::invalid_argument);
}

TEST_CASE("bundle matches the counting oracle on every column pattern") {
  // All 2^n column patterns for each n: lay the patterns out along the
  // dimension so one bundle call covers the full truth table.
  for (std::size_t n = 1; n <= 7; ++n) {
    const std::size_t dim = 1ULL << n;
    std::vector<Hypervector> vs;
    for (std::size_t row = 0; row < n; ++row) {
      Hypervector hv(dim);
      for (std::size_t col = 0; col < dim; ++col) hv.set_bit(col, (col >> row) & 1ULL);
      vs.push_back(std::move(hv));
    }
    const auto got = bundle(vs);
    for (std::size_t col = 0; col < dim; ++col) {
      const auto ones = static_cast<std::size_t>(std::popcount(col));
      REQUIRE(got.bit(col) == (2 * ones > n));
    }
  }
}

TEST_CASE("bundle matches the counting oracle on random sets") {
  SplitMix64 rng(17);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u, 33u, 64u, 65u}) {
    const std::size_t dim = 130;
    std::vector<Hypervector> vs;
    for (std::size_t i = 0; i < n; ++i) vs.push_back(Hypervector::random(dim, rng));
    REQUIRE(bundle(vs) == naive_bundle(vs));
  }
}

TEST_CASE("majority accumulator equals one-shot bundle") {
  SplitMix64 rng(19);
  const std::size_t dim = 257;
  std::vector<Hypervector> vs;
  MajorityAccumulator acc(dim);
  for (std::size_t i = 0; i < 40; ++i) {
    vs.push_back(Hypervector::random(dim, rng));
    acc.add(vs.back());
    REQUIRE(acc.size() == i + 1);
    REQUIRE(acc.majority() == naive_bundle(vs));
  }
  // Exact per-position counts survive the bit-plane representation.
  for (std::size_t pos : {0u, 63u, 64u, 128u, 256u}) {
    std::uint64_t ones = 0;
    for (const auto& hv : vs) ones += hv.bit(pos);
    CHECK(acc.count_at(pos) == ones);
  }
}

TEST_CASE("majority stays strict when per-position counts lag the threshold") {
  // Three zero vectors and one non-zero vector: every per-position count is 0
  // or 1, so the accumulator holds a single bit plane while the strict
  // threshold (> 2) needs two bits. No bit may survive.
  const auto v = Hypervector::from_bits("0000000000110010");
  const std::vector<Hypervector> vs = {Hypervector(16), v, Hypervector(16), Hypervector(16)};
  CHECK(bundle(vs) == Hypervector(16));

  MajorityAccumulator acc(16);
  for (const auto& hv : vs) acc.add(hv);
  CHECK(acc.count_at(10) == 1);
  CHECK(acc.majority() == Hypervector(16));

  // Same shape at larger n: one vote among eight never wins.
  MajorityAccumulator wide(64);
  Hypervector one(64);
  one.set_bit(63, true);
  wide.add(one);
  for (int i = 0; i < 7; ++i) wide.add(Hypervector(64));
  CHECK(wide.majority() == Hypervector(64));
  CHECK(wide.count_at(63) == 1);
}

TEST_CASE("accumulating a bound pair equals binding then adding") {
  SplitMix64 rng(23);
  const std::size_t dim = 100;
  MajorityAccumulator direct(dim), fused(dim);
  std::vector<Hypervector> bound;
  for (int i = 0; i < 9; ++i) {
    const auto a = Hypervector::random(dim, rng);
    const auto b = Hypervector::random(dim, rng);
    direct.add(bind(a, b));
    fused.add_bound(a, b);
  }
  CHECK(direct.majority() == fused.majority());
  MajorityAccumulator empty(dim);
  CHECK_THROWS_AS(empty.majority(), std::invalid_argument);
}

TEST_CASE("level table spacing law holds exactly") {
  SplitMix64 rng(29);
  struct Case {
    std::size_t dim;
    int levels;
  };
  for (const auto& c : {Case{8, 4}, Case{64, 4}, Case{100, 7}, Case{1024, 16}, Case{640, 640}}) {
    SplitMix64 local = rng.split(c.dim * 1000 + static_cast<std::size_t>(c.levels));
    const auto table = generate_level_table(c.dim, c.levels, local);
    REQUIRE(table.size() == static_cast<std::size_t>(c.levels));
    const std::size_t p = syhd::flips_per_level(c.dim, c.levels);
    for (std::size_t i = 0; i < table.size(); ++i) {
      for (std::size_t j = 0; j < table.size(); ++j) {
        REQUIRE(hamming_bits(table[i], table[j]) == (i > j ? i - j : j - i) * p);
      }
    }
  }
}

TEST_CASE("level table worked example dim 8 q 4") {
  SplitMix64 rng(31);
  const auto table = generate_level_table(8, 4, rng);
  // p = floor(8/4) = 2, so extreme levels differ in 6 of 8 bits.
  CHECK(hamming_bits(table[0], table[3]) == 6);
  CHECK(hamming_bits(table[1], table[2]) == 2);
  CHECK(hamming_bits(table[0], table[1]) == 2);
}

TEST_CASE("level table is seed-deterministic and validates arguments") {
  SplitMix64 r1(37), r2(37), r3(38);
  const auto t1 = generate_level_table(256, 8, r1);
  const auto t2 = generate_level_table(256, 8, r2);
  const auto t3 = generate_level_table(256, 8, r3);
  CHECK(t1 == t2);
  CHECK(t1 != t3);

  SplitMix64 rng(41);
  CHECK_THROWS_AS(generate_level_table(8, 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(generate_level_table(8, 9, rng), std::invalid_argument);
}
