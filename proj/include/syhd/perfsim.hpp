#pragma once

// Analytic cycle model of the accelerator: a weight-stationary systolic array
// for the dense layers and a pipelined HD encode/classify datapath, plus a
// small scheduling compiler that searches array shapes and tile-loop orders.
//
// Timing model (transaction level, not RTL):
//   - A (w_sys x h_sys) array consumes one w-wide input segment per cycle;
//     finishing an output accumulation group costs an extra log2(w_sys)
//     drain through the reduction tree, then 1 ALU cycle (bias/activation).
//   - Output-major order drains once per output tile but re-streams the
//     input tile for every output tile; input-major loads each input tile
//     once but pays the drain on every weight tile (partial sums must be
//     banked between visits). Which one wins depends on DRAM bandwidth.
//   - DMA is a single bandwidth scalar (words/cycle) with ideal double
//     buffering: within a layer, transfers fully overlap compute, so the
//     layer costs max(compute cycles, ceil(DMA words / bandwidth)).

#include <cstdint>
#include <string>
#include <vector>

namespace syhd {

struct SystolicConfig {
  std::size_t w_sys = 32;  // columns; must be a power of 2
  std::size_t h_sys = 32;  // rows
  double clock_mhz = 344.0;
  double dram_bandwidth = 16.0;  // words per cycle

  void validate() const;
};

// Layer widths, input first: {617, 561, 561} is a two-layer network.
struct NetworkShape {
  std::vector<std::size_t> widths;

  std::size_t layer_count() const { return widths.empty() ? 0 : widths.size() - 1; }
  void validate() const;
};

// (ceil(d_in / w_sys) + log2(w_sys)) * ceil(d_out / h_sys).
std::uint64_t layer_cycles(std::size_t d_in, std::size_t d_out, const SystolicConfig& cfg);

struct NetworkCycles {
  std::vector<std::uint64_t> per_layer;  // max(compute, weight transfer) each
  std::uint64_t total = 0;
  double microseconds = 0.0;
};

// Closed-form estimate: per layer, compute and the one-time weight transfer
// overlap perfectly, so the layer costs max(layer_cycles, ceil(words/bw)).
NetworkCycles network_cycles(const NetworkShape& shape, const SystolicConfig& cfg);

enum class HdMode { kParallel, kSequential };

struct HdPipeConfig {
  std::size_t dh = 10240;
  std::size_t dl = 617;
  std::size_t classes = 26;
  std::size_t fanin = 16;  // adder-tree fan-in limit
  HdMode mode = HdMode::kParallel;
  std::size_t chunk_width = 64;  // sequential mode only

  void validate() const;
};

struct HdLatency {
  std::uint64_t pipeline_depth = 0;    // cycles from input to decision
  std::uint64_t per_sample_cycles = 0; // parallel: depth; sequential: chunked
  double throughput = 0.0;             // samples per cycle once the pipe is full
};

// Parallel: depth = 1 (level LUT) + 1 (bind) + ceil(log_fanin(dl)) bundling
// + 1 (centroid compare) + ceil(log_fanin(dh)) distance adders
// + ceil(log2(classes)) tree comparator; one sample completes every cycle.
// Sequential: the dh positions are processed chunk_width at a time, so one
// sample takes ceil(dh / chunk_width) passes of the chunk-wide pipeline.
HdLatency hd_latency(const HdPipeConfig& cfg);

enum class TileOrder { kOutputMajor, kInputMajor };
enum class InstrKind { kLoadWeights, kLoadInputs, kMatmul, kAlu, kStore };

struct Instr {
  InstrKind kind;
  std::size_t layer = 0;
  std::size_t ti = 0;  // input-tile index
  std::size_t to = 0;  // output-tile index
  std::uint64_t words = 0;   // DMA words for loads/stores
  std::uint64_t cycles = 0;  // compute cycles for matmul/alu
};

struct Schedule {
  std::size_t w_sys = 0;
  std::size_t h_sys = 0;
  double dram_bandwidth = 0.0;
  std::vector<TileOrder> layer_orders;
  std::vector<Instr> instrs;
  std::uint64_t total_cycles = 0;
};

struct CompileParams {
  std::size_t pe_budget = 1024;  // max w_sys * h_sys
  double dram_bandwidth = 16.0;
  // Guard on the exhaustive 2^layers order search.
  std::size_t max_layers = 12;
};

// All power-of-2 w_sys with floor(pe_budget / w_sys) >= 1 rows.
std::vector<std::pair<std::size_t, std::size_t>> enumerate_array_shapes(std::size_t pe_budget);

// Emits the instruction stream for one layer on a fixed array and order.
std::vector<Instr> build_layer_schedule(std::size_t layer, std::size_t d_in, std::size_t d_out,
                                        std::size_t w_sys, std::size_t h_sys, TileOrder order);

// Walks the instruction list with the double-buffer timing model: per layer,
// max(compute cycles, DMA cycles). Also validates the schedule: loads precede
// their matmul, every weight word is loaded exactly once per layer
// (weight-stationary), stores cover every output exactly once.
std::uint64_t simulate(const Schedule& schedule, const NetworkShape& shape);

// Exhaustive argmin over array shapes x per-layer tile orders. Ties prefer
// larger w_sys, then output-major orders.
Schedule compile(const NetworkShape& shape, const CompileParams& params);

struct PerfRow {
  std::string component;
  std::string config;
  std::uint64_t cycles = 0;
  double us = 0.0;
  double throughput = 0.0;  // samples per second at the given clock
};

// NN, HD, and end-to-end rows at the given clock.
std::vector<PerfRow> perf_report(const NetworkShape& shape, const SystolicConfig& nn_cfg,
                                 const HdPipeConfig& hd_cfg);
std::string perf_report_csv(const std::vector<PerfRow>& rows);
std::string perf_report_text(const std::vector<PerfRow>& rows);

}  // namespace syhd
