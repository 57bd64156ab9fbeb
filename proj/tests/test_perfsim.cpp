#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "syhd/perfsim.hpp"
#include "syhd/rng.hpp"

using syhd::build_layer_schedule;
using syhd::compile;
using syhd::CompileParams;
using syhd::enumerate_array_shapes;
using syhd::hd_latency;
using syhd::HdMode;
using syhd::HdPipeConfig;
using syhd::Instr;
using syhd::InstrKind;
using syhd::layer_cycles;
using syhd::network_cycles;
using syhd::NetworkShape;
using syhd::perf_report;
using syhd::perf_report_csv;
using syhd::perf_report_text;
using syhd::Schedule;
using syhd::simulate;
using syhd::SplitMix64;
using syhd::SystolicConfig;
using syhd::TileOrder;

namespace {

SystolicConfig cfg_wh(std::size_t w, std::size_t h, double bw = 16.0) {
  SystolicConfig cfg;
  cfg.w_sys = w;
  cfg.h_sys = h;
  cfg.dram_bandwidth = bw;
  return cfg;
}

Schedule assemble(std::size_t w, std::size_t h, double bw, std::vector<TileOrder> orders,
                  const NetworkShape& shape) {
  Schedule s;
  s.w_sys = w;
  s.h_sys = h;
  s.dram_bandwidth = bw;
  s.layer_orders = orders;
  for (std::size_t l = 0; l < shape.layer_count(); ++l) {
    auto instrs = build_layer_schedule(l, shape.widths[l], shape.widths[l + 1], w, h, orders[l]);
    s.instrs.insert(s.instrs.end(), instrs.begin(), instrs.end());
  }
  return s;
}

// Exhaustive reference search mirroring the compiler's candidate space and
// tie preferences (larger w_sys, then earlier = more output-major combos).
Schedule reference_compile(const NetworkShape& shape, const CompileParams& params) {
  Schedule best;
  bool have = false;
  for (const auto& [w, h] : enumerate_array_shapes(params.pe_budget)) {
    const std::size_t layers = shape.layer_count();
    for (std::uint64_t combo = 0; combo < (1ULL << layers); ++combo) {
      std::vector<TileOrder> orders;
      for (std::size_t l = 0; l < layers; ++l) {
        orders.push_back((combo >> l) & 1 ? TileOrder::kInputMajor : TileOrder::kOutputMajor);
      }
      Schedule cand = assemble(w, h, params.dram_bandwidth, orders, shape);
      cand.total_cycles = simulate(cand, shape);
      if (!have || cand.total_cycles < best.total_cycles ||
          (cand.total_cycles == best.total_cycles && cand.w_sys > best.w_sys)) {
        best = std::move(cand);
        have = true;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("layer cycles match the closed form on worked examples") {
  // (ceil(617/32) + log2 32) * ceil(561/32) = (20 + 5) * 18.
  CHECK(layer_cycles(617, 561, cfg_wh(32, 32)) == 450);
  // A single tile costs the stream plus the drain.
  CHECK(layer_cycles(8, 4, cfg_wh(8, 4)) == 1 + 3);
  // w = 1 has no reduction tree.
  CHECK(layer_cycles(5, 3, cfg_wh(1, 2)) == 5 * 2);
  CHECK(layer_cycles(1, 1, cfg_wh(1, 1)) == 1);

  // Cycles never decrease when the layer grows.
  for (std::size_t d_in = 1; d_in <= 40; d_in += 3) {
    for (std::size_t d_out = 1; d_out <= 40; d_out += 3) {
      const auto c = layer_cycles(d_in, d_out, cfg_wh(4, 4));
      CHECK(layer_cycles(d_in + 1, d_out, cfg_wh(4, 4)) >= c);
      CHECK(layer_cycles(d_in, d_out + 1, cfg_wh(4, 4)) >= c);
    }
  }

  CHECK_THROWS_AS(layer_cycles(8, 8, cfg_wh(3, 4)), std::invalid_argument);
  CHECK_THROWS_AS(layer_cycles(8, 8, cfg_wh(4, 0)), std::invalid_argument);
  CHECK_THROWS_AS(layer_cycles(0, 8, cfg_wh(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(layer_cycles(8, 0, cfg_wh(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(layer_cycles(8, 8, cfg_wh(4, 4, -1.0)), std::invalid_argument);
}

TEST_CASE("network cycles overlap weight transfers with compute") {
  const NetworkShape net{{617, 561, 561}};
  const auto out = network_cycles(net, cfg_wh(32, 32, 16.0));
  REQUIRE(out.per_layer.size() == 2);
  // Both layers are transfer-bound at 16 words/cycle:
  // ceil(617*561/16) = 21634, ceil(561*561/16) = 19671.
  CHECK(out.per_layer[0] == 21634);
  CHECK(out.per_layer[1] == 19671);
  CHECK(out.total == 41305);
  CHECK(out.microseconds == doctest::Approx(41305.0 / 344.0).epsilon(1e-12));

  // Infinite-for-practical-purposes bandwidth leaves pure compute.
  const auto fast = network_cycles(net, cfg_wh(32, 32, 1e18));
  CHECK(fast.per_layer[0] == 450);
  CHECK(fast.per_layer[1] == (18 + 5) * 18);
  CHECK(fast.total == 450 + 414);

  CHECK_THROWS_AS(network_cycles(NetworkShape{{617}}, cfg_wh(32, 32)), std::invalid_argument);
  CHECK_THROWS_AS(network_cycles(NetworkShape{{8, 0, 4}}, cfg_wh(32, 32)),
                  std::invalid_argument);
}

TEST_CASE("hd pipeline depth on the worked configurations") {
  // Parallel, dh=10240 dl=617 c=26 fanin=16:
  // 1 + 1 + ceil(log16 617)=3 + 1 + ceil(log16 10240)=4 + ceil(log2 26)=5.
  const auto par = hd_latency(HdPipeConfig{});
  CHECK(par.pipeline_depth == 15);
  CHECK(par.per_sample_cycles == 15);
  CHECK(par.throughput == 1.0);

  // Sequential with 64-wide chunks: shared depth 11, chunk tree 2, so each of
  // the ceil(10240/64) = 160 passes takes 13 cycles.
  HdPipeConfig seq;
  seq.mode = HdMode::kSequential;
  seq.chunk_width = 64;
  const auto s = hd_latency(seq);
  CHECK(s.pipeline_depth == 13);
  CHECK(s.per_sample_cycles == 160 * 13);
  CHECK(s.throughput == doctest::Approx(1.0 / 2080.0).epsilon(1e-15));

  // Degenerate single-everything pipe: LUT + bind + compare the one class.
  const auto tiny = hd_latency(HdPipeConfig{1, 1, 1, 2, HdMode::kParallel, 1});
  CHECK(tiny.pipeline_depth == 3);

  // A fan-in of 2 on small dims.
  const auto small = hd_latency(HdPipeConfig{8, 4, 2, 2, HdMode::kParallel, 8});
  CHECK(small.pipeline_depth == 1 + 1 + 2 + 1 + 3 + 1);
}

TEST_CASE("sequential mode is never faster than parallel") {
  SplitMix64 rng(131);
  for (int it = 0; it < 100; ++it) {
    HdPipeConfig cfg;
    cfg.dh = 1 + rng.next_below(4096);
    cfg.dl = 1 + rng.next_below(700);
    cfg.classes = 1 + rng.next_below(26);
    cfg.fanin = 2 + rng.next_below(30);
    cfg.mode = HdMode::kParallel;
    const auto par = hd_latency(cfg);
    cfg.mode = HdMode::kSequential;
    cfg.chunk_width = 1 + rng.next_below(cfg.dh);
    const auto seq = hd_latency(cfg);
    REQUIRE(seq.per_sample_cycles >= par.per_sample_cycles);
    REQUIRE(seq.throughput <= par.throughput);
  }

  CHECK_THROWS_AS(hd_latency(HdPipeConfig{0, 1, 1, 2, HdMode::kParallel, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hd_latency(HdPipeConfig{8, 1, 1, 1, HdMode::kParallel, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hd_latency(HdPipeConfig{8, 1, 1, 2, HdMode::kSequential, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hd_latency(HdPipeConfig{8, 1, 1, 2, HdMode::kSequential, 9}),
                  std::invalid_argument);
}

TEST_CASE("array shape enumeration walks powers of two") {
  const auto shapes = enumerate_array_shapes(1024);
  REQUIRE(shapes.size() == 11);
  std::size_t w = 1;
  for (const auto& [sw, sh] : shapes) {
    CHECK(sw == w);
    CHECK(sh == 1024 / w);
    CHECK(sw * sh <= 1024);
    w *= 2;
  }

  CHECK(enumerate_array_shapes(1) ==
        std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}});
  CHECK(enumerate_array_shapes(3) ==
        std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}, {2, 1}});
}

TEST_CASE("simulate prices the hand-built single-tile layer") {
  // One layer, d_in=2 d_out=1 on a 2x1 array: compute is 1 stream + 1 drain,
  // DMA moves 2 input + 2 weight + 1 output words.
  const NetworkShape net{{2, 1}};
  auto s = assemble(2, 1, 1.0, {TileOrder::kOutputMajor}, net);
  CHECK(simulate(s, net) == 5);  // DMA-bound: ceil(5 / 1)
  s.dram_bandwidth = 16.0;
  CHECK(simulate(s, net) == 2);  // compute-bound: max(2, ceil(5/16))
}

TEST_CASE("tile orders trade input re-streaming against extra drains") {
  // d_in=4 d_out=2 on a 2x1 array: output-major re-streams the inputs per
  // output tile (18 DMA words, 6 compute cycles); input-major banks partial
  // sums (14 DMA words, 8 compute cycles).
  const NetworkShape net{{4, 2}};
  auto om = assemble(2, 1, 1e9, {TileOrder::kOutputMajor}, net);
  auto im = assemble(2, 1, 1e9, {TileOrder::kInputMajor}, net);
  CHECK(simulate(om, net) == 6);
  CHECK(simulate(im, net) == 8);
  // Output-major compute equals the closed-form layer cost.
  CHECK(simulate(om, net) == layer_cycles(4, 2, cfg_wh(2, 1, 1e9)));

  om.dram_bandwidth = im.dram_bandwidth = 0.5;
  CHECK(simulate(om, net) == 36);  // ceil(18 / 0.5)
  CHECK(simulate(im, net) == 28);  // ceil(14 / 0.5)
}

TEST_CASE("simulate rejects malformed schedules") {
  const NetworkShape net{{2, 1}};
  const auto good = assemble(2, 1, 16.0, {TileOrder::kOutputMajor}, net);

  // Missing everything.
  Schedule empty = good;
  empty.instrs.clear();
  CHECK_THROWS_AS(simulate(empty, net), std::invalid_argument);

  // Duplicate weight tile.
  Schedule dup = good;
  for (const auto& in : good.instrs) {
    if (in.kind == InstrKind::kLoadWeights) dup.instrs.push_back(in);
  }
  CHECK_THROWS_AS(simulate(dup, net), std::invalid_argument);

  // Matmul before its loads.
  Schedule reordered = good;
  std::rotate(reordered.instrs.begin(), reordered.instrs.begin() + 2, reordered.instrs.end());
  CHECK_THROWS_AS(simulate(reordered, net), std::invalid_argument);

  // Weight words must cover the layer exactly.
  Schedule short_weights = good;
  for (auto& in : short_weights.instrs) {
    if (in.kind == InstrKind::kLoadWeights) in.words -= 1;
  }
  CHECK_THROWS_AS(simulate(short_weights, net), std::invalid_argument);

  // Stores must cover the outputs exactly.
  Schedule no_store = good;
  no_store.instrs.erase(
      std::remove_if(no_store.instrs.begin(), no_store.instrs.end(),
                     [](const Instr& in) { return in.kind == InstrKind::kStore; }),
      no_store.instrs.end());
  CHECK_THROWS_AS(simulate(no_store, net), std::invalid_argument);

  // Zero-cycle matmul.
  Schedule zero = good;
  for (auto& in : zero.instrs) {
    if (in.kind == InstrKind::kMatmul) in.cycles = 0;
  }
  CHECK_THROWS_AS(simulate(zero, net), std::invalid_argument);

  Schedule bad_bw = good;
  bad_bw.dram_bandwidth = 0.0;
  CHECK_THROWS_AS(simulate(bad_bw, net), std::invalid_argument);
}

TEST_CASE("a budget of one processing element serializes every product") {
  for (const auto& widths :
       {std::vector<std::size_t>{3, 2}, {10, 7, 4}, {5, 5, 5, 5}, {1, 1}}) {
    const NetworkShape net{widths};
    CompileParams params;
    params.pe_budget = 1;
    const auto s = compile(net, params);
    std::uint64_t want = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      want += static_cast<std::uint64_t>(widths[l]) * widths[l + 1];
    }
    CHECK(s.w_sys == 1);
    CHECK(s.h_sys == 1);
    CHECK(s.total_cycles == want);
    CHECK(simulate(s, net) == want);
  }
}

TEST_CASE("compile finds the exhaustive optimum with its tie preferences") {
  SplitMix64 rng(137);
  for (int it = 0; it < 60; ++it) {
    std::vector<std::size_t> widths;
    const std::size_t layers = 1 + rng.next_below(3);
    for (std::size_t i = 0; i <= layers; ++i) widths.push_back(1 + rng.next_below(40));
    const NetworkShape net{widths};

    CompileParams params;
    params.pe_budget = std::size_t{1} << (2 * rng.next_below(4));  // 1, 4, 16, 64
    params.dram_bandwidth = (it % 2) ? 16.0 : 0.5;

    const auto got = compile(net, params);
    const auto want = reference_compile(net, params);
    REQUIRE(got.total_cycles == want.total_cycles);
    REQUIRE(got.w_sys == want.w_sys);
    REQUIRE(got.h_sys == want.h_sys);
    REQUIRE(got.layer_orders == want.layer_orders);
    REQUIRE(simulate(got, net) == got.total_cycles);

    // No candidate beats the reported optimum, and among optima none has a
    // larger array width than the chosen one.
    for (const auto& [w, h] : enumerate_array_shapes(params.pe_budget)) {
      for (std::uint64_t combo = 0; combo < (1ULL << layers); ++combo) {
        std::vector<TileOrder> orders;
        for (std::size_t l = 0; l < layers; ++l) {
          orders.push_back((combo >> l) & 1 ? TileOrder::kInputMajor : TileOrder::kOutputMajor);
        }
        auto cand = assemble(w, h, params.dram_bandwidth, orders, net);
        const auto cycles = simulate(cand, net);
        REQUIRE(cycles >= got.total_cycles);
        if (cycles == got.total_cycles) REQUIRE(w <= got.w_sys);
      }
    }
  }

  NetworkShape too_deep{std::vector<std::size_t>(14, 4)};
  CHECK_THROWS_AS(compile(too_deep, CompileParams{}), std::invalid_argument);
  CompileParams bad;
  bad.dram_bandwidth = 0.0;
  CHECK_THROWS_AS(compile(NetworkShape{{2, 2}}, bad), std::invalid_argument);
}

TEST_CASE("perf report combines both datapaths") {
  const NetworkShape net{{617, 561, 561}};
  const auto rows = perf_report(net, SystolicConfig{}, HdPipeConfig{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].component == "nn");
  CHECK(rows[1].component == "hd");
  CHECK(rows[2].component == "total");

  CHECK(rows[0].cycles == 41305);
  CHECK(rows[1].cycles == 15);
  CHECK(rows[2].cycles == 41305 + 15);
  CHECK(rows[0].us == doctest::Approx(41305.0 / 344.0).epsilon(1e-12));
  CHECK(rows[1].throughput == doctest::Approx(344e6).epsilon(1e-12));
  CHECK(rows[2].throughput ==
        doctest::Approx(std::min(rows[0].throughput, rows[1].throughput)).epsilon(1e-12));

  const auto csv = perf_report_csv(rows);
  CHECK(csv.rfind("component,config,cycles,us,throughput\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const auto text = perf_report_text(rows);
  CHECK(text.find("nn") != std::string::npos);
  CHECK(text.find("hd") != std::string::npos);
  CHECK(text.find("total") != std::string::npos);
}
