#include "syhd/perfsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "syhd/numfmt.hpp"

namespace syhd {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Smallest k with fanin^k >= x (depth of a fan-in-limited tree over x leaves).
std::uint64_t tree_depth(std::uint64_t fanin, std::uint64_t x) {
  std::uint64_t depth = 0;
  std::uint64_t reach = 1;
  while (reach < x) {
    reach *= fanin;
    ++depth;
  }
  return depth;
}

std::uint64_t dma_cycles(std::uint64_t words, double bandwidth) {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(words) / bandwidth));
}

}  // namespace

void SystolicConfig::validate() const {
  if (w_sys == 0 || !std::has_single_bit(w_sys)) {
    throw std::invalid_argument("w_sys must be a power of 2 (got " + std::to_string(w_sys) + ")");
  }
  if (h_sys == 0) throw std::invalid_argument("h_sys must be >= 1");
  if (clock_mhz <= 0.0) throw std::invalid_argument("clock must be positive");
  if (dram_bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be positive");
}

void NetworkShape::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("network needs at least input and one layer");
  for (const std::size_t w : widths) {
    if (w == 0) throw std::invalid_argument("layer widths must be >= 1");
  }
}

std::uint64_t layer_cycles(std::size_t d_in, std::size_t d_out, const SystolicConfig& cfg) {
  cfg.validate();
  if (d_in == 0 || d_out == 0) throw std::invalid_argument("layer dims must be >= 1");
  const std::uint64_t log2w = static_cast<std::uint64_t>(std::countr_zero(cfg.w_sys));
  return (ceil_div(d_in, cfg.w_sys) + log2w) * ceil_div(d_out, cfg.h_sys);
}

NetworkCycles network_cycles(const NetworkShape& shape, const SystolicConfig& cfg) {
  shape.validate();
  cfg.validate();
  NetworkCycles out;
  for (std::size_t l = 0; l < shape.layer_count(); ++l) {
    const std::size_t d_in = shape.widths[l];
    const std::size_t d_out = shape.widths[l + 1];
    const std::uint64_t compute = layer_cycles(d_in, d_out, cfg);
    const std::uint64_t transfer =
        dma_cycles(static_cast<std::uint64_t>(d_in) * d_out, cfg.dram_bandwidth);
    out.per_layer.push_back(std::max(compute, transfer));
    out.total += out.per_layer.back();
  }
  out.microseconds = static_cast<double>(out.total) / cfg.clock_mhz;
  return out;
}

void HdPipeConfig::validate() const {
  if (dh == 0 || dl == 0) throw std::invalid_argument("hd dims must be >= 1");
  if (classes == 0) throw std::invalid_argument("class count must be >= 1");
  if (fanin < 2) throw std::invalid_argument("adder-tree fan-in must be >= 2");
  if (mode == HdMode::kSequential && (chunk_width == 0 || chunk_width > dh)) {
    throw std::invalid_argument("chunk width must be in [1, dh]");
  }
}

HdLatency hd_latency(const HdPipeConfig& cfg) {
  cfg.validate();
  const std::uint64_t shared = 1                            // level LUT
                               + 1                          // bind
                               + tree_depth(cfg.fanin, cfg.dl)  // per-position bundling
                               + 1                          // centroid compare
                               + tree_depth(2, cfg.classes);    // class comparator tree
  HdLatency out;
  if (cfg.mode == HdMode::kParallel) {
    out.pipeline_depth = shared + tree_depth(cfg.fanin, cfg.dh);
    out.per_sample_cycles = out.pipeline_depth;
    out.throughput = 1.0;
  } else {
    const std::uint64_t chunk_depth = shared + tree_depth(cfg.fanin, cfg.chunk_width);
    const std::uint64_t passes = ceil_div(cfg.dh, cfg.chunk_width);
    out.pipeline_depth = chunk_depth;
    out.per_sample_cycles = passes * chunk_depth;
    out.throughput = 1.0 / static_cast<double>(out.per_sample_cycles);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> enumerate_array_shapes(std::size_t pe_budget) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t w = 1; w <= pe_budget; w *= 2) {
    const std::size_t h = pe_budget / w;
    if (h >= 1) out.emplace_back(w, h);
    if (w > pe_budget / 2) break;  // avoid overflow on w *= 2
  }
  return out;
}

std::vector<Instr> build_layer_schedule(std::size_t layer, std::size_t d_in, std::size_t d_out,
                                        std::size_t w_sys, std::size_t h_sys, TileOrder order) {
  if (!std::has_single_bit(w_sys)) throw std::invalid_argument("w_sys must be a power of 2");
  const std::uint64_t log2w = static_cast<std::uint64_t>(std::countr_zero(w_sys));
  const std::size_t ti_count = ceil_div(d_in, w_sys);
  const std::size_t to_count = ceil_div(d_out, h_sys);
  const auto tile_w = [&](std::size_t ti) { return std::min(w_sys, d_in - ti * w_sys); };
  const auto tile_h = [&](std::size_t to) { return std::min(h_sys, d_out - to * h_sys); };

  std::vector<Instr> out;
  if (order == TileOrder::kOutputMajor) {
    for (std::size_t to = 0; to < to_count; ++to) {
      for (std::size_t ti = 0; ti < ti_count; ++ti) {
        out.push_back({InstrKind::kLoadInputs, layer, ti, to, tile_w(ti), 0});
        out.push_back({InstrKind::kLoadWeights, layer, ti, to,
                       static_cast<std::uint64_t>(tile_w(ti)) * tile_h(to), 0});
        // Steady-state tiles stream in one cycle; the group's last tile also
        // drains the reduction tree.
        out.push_back({InstrKind::kMatmul, layer, ti, to, 0,
                       1 + (ti + 1 == ti_count ? log2w : 0)});
      }
      // Bias/activation is pipelined into the drain: zero extra cycles.
      out.push_back({InstrKind::kAlu, layer, 0, to, 0, 0});
      out.push_back({InstrKind::kStore, layer, 0, to, tile_h(to), 0});
    }
  } else {
    for (std::size_t ti = 0; ti < ti_count; ++ti) {
      out.push_back({InstrKind::kLoadInputs, layer, ti, 0, tile_w(ti), 0});
      for (std::size_t to = 0; to < to_count; ++to) {
        out.push_back({InstrKind::kLoadWeights, layer, ti, to,
                       static_cast<std::uint64_t>(tile_w(ti)) * tile_h(to), 0});
        // Partial sums are banked between visits, so every tile drains.
        out.push_back({InstrKind::kMatmul, layer, ti, to, 0, 1 + log2w});
        if (ti + 1 == ti_count) {
          out.push_back({InstrKind::kAlu, layer, ti, to, 0, 0});
          out.push_back({InstrKind::kStore, layer, ti, to, tile_h(to), 0});
        }
      }
    }
  }
  return out;
}

std::uint64_t simulate(const Schedule& schedule, const NetworkShape& shape) {
  shape.validate();
  if (schedule.dram_bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  const double bw = schedule.dram_bandwidth;

  std::map<std::size_t, std::uint64_t> compute_per_layer;
  std::map<std::size_t, std::uint64_t> weight_words_per_layer;
  std::map<std::size_t, std::uint64_t> store_words_per_layer;
  std::map<std::size_t, std::uint64_t> dma_words_per_layer;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> loaded_weight_tiles;
  std::set<std::pair<std::size_t, std::size_t>> loaded_input_tiles;

  for (const Instr& in : schedule.instrs) {
    switch (in.kind) {
      case InstrKind::kLoadWeights: {
        const auto key = std::make_tuple(in.layer, in.ti, in.to);
        if (!loaded_weight_tiles.insert(key).second) {
          throw std::invalid_argument("malformed schedule: weight tile loaded twice");
        }
        weight_words_per_layer[in.layer] += in.words;
        dma_words_per_layer[in.layer] += in.words;
        break;
      }
      case InstrKind::kLoadInputs:
        loaded_input_tiles.insert({in.layer, in.ti});
        dma_words_per_layer[in.layer] += in.words;
        break;
      case InstrKind::kMatmul: {
        if (!loaded_weight_tiles.count({in.layer, in.ti, in.to}) ||
            !loaded_input_tiles.count({in.layer, in.ti})) {
          throw std::invalid_argument("malformed schedule: matmul before its loads");
        }
        if (in.cycles == 0) throw std::invalid_argument("malformed schedule: zero-cycle matmul");
        compute_per_layer[in.layer] += in.cycles;
        break;
      }
      case InstrKind::kAlu:
        compute_per_layer[in.layer] += in.cycles;
        break;
      case InstrKind::kStore:
        store_words_per_layer[in.layer] += in.words;
        dma_words_per_layer[in.layer] += in.words;
        break;
    }
  }

  // Per layer, compute and DMA overlap under ideal double buffering, so the
  // layer costs whichever engine is the bottleneck.
  std::uint64_t total = 0;
  for (std::size_t l = 0; l < shape.layer_count(); ++l) {
    const std::uint64_t want =
        static_cast<std::uint64_t>(shape.widths[l]) * shape.widths[l + 1];
    const auto it = weight_words_per_layer.find(l);
    if (it == weight_words_per_layer.end() || it->second != want) {
      throw std::invalid_argument("malformed schedule: layer " + std::to_string(l) +
                                  " weight words do not cover the layer exactly once");
    }
    const auto st = store_words_per_layer.find(l);
    if (st == store_words_per_layer.end() || st->second != shape.widths[l + 1]) {
      throw std::invalid_argument("malformed schedule: layer " + std::to_string(l) +
                                  " stores do not cover the outputs exactly once");
    }
    total += std::max(compute_per_layer[l], dma_cycles(dma_words_per_layer[l], bw));
  }
  return total;
}

Schedule compile(const NetworkShape& shape, const CompileParams& params) {
  shape.validate();
  const std::size_t layers = shape.layer_count();
  if (layers > params.max_layers) {
    throw std::invalid_argument("order search is exponential in layers; got " +
                                std::to_string(layers) + " > max " +
                                std::to_string(params.max_layers));
  }
  if (params.dram_bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  const auto shapes = enumerate_array_shapes(params.pe_budget);
  if (shapes.empty()) throw std::invalid_argument("empty candidate set (pe budget 0)");

  Schedule best;
  bool have_best = false;
  for (const auto& [w, h] : shapes) {
    for (std::uint64_t combo = 0; combo < (1ULL << layers); ++combo) {
      Schedule cand;
      cand.w_sys = w;
      cand.h_sys = h;
      cand.dram_bandwidth = params.dram_bandwidth;
      for (std::size_t l = 0; l < layers; ++l) {
        const TileOrder order =
            (combo >> l) & 1 ? TileOrder::kInputMajor : TileOrder::kOutputMajor;
        cand.layer_orders.push_back(order);
        auto instrs =
            build_layer_schedule(l, shape.widths[l], shape.widths[l + 1], w, h, order);
        cand.instrs.insert(cand.instrs.end(), instrs.begin(), instrs.end());
      }
      cand.total_cycles = simulate(cand, shape);
      // Ties prefer larger w_sys; the combo loop visits output-major first,
      // so strict < keeps the preferred orders on equal cycles and w.
      const bool better =
          !have_best || cand.total_cycles < best.total_cycles ||
          (cand.total_cycles == best.total_cycles && cand.w_sys > best.w_sys);
      if (better) {
        best = std::move(cand);
        have_best = true;
      }
    }
  }
  return best;
}

std::vector<PerfRow> perf_report(const NetworkShape& shape, const SystolicConfig& nn_cfg,
                                 const HdPipeConfig& hd_cfg) {
  const double clock = nn_cfg.clock_mhz;
  const NetworkCycles nn = network_cycles(shape, nn_cfg);
  const HdLatency hd = hd_latency(hd_cfg);

  std::vector<PerfRow> rows;
  {
    PerfRow row;
    row.component = "nn";
    row.config = "w=" + std::to_string(nn_cfg.w_sys) + " h=" + std::to_string(nn_cfg.h_sys) +
                 " bw=" + to_shortest(nn_cfg.dram_bandwidth);
    row.cycles = nn.total;
    row.us = nn.microseconds;
    row.throughput = clock * 1e6 / static_cast<double>(nn.total);
    rows.push_back(row);
  }
  {
    PerfRow row;
    row.component = "hd";
    row.config = "dh=" + std::to_string(hd_cfg.dh) + " dl=" + std::to_string(hd_cfg.dl) +
                 " c=" + std::to_string(hd_cfg.classes) +
                 " fanin=" + std::to_string(hd_cfg.fanin) +
                 (hd_cfg.mode == HdMode::kParallel
                      ? std::string(" mode=parallel")
                      : " mode=sequential chunk=" + std::to_string(hd_cfg.chunk_width));
    row.cycles = hd.per_sample_cycles;
    row.us = static_cast<double>(hd.per_sample_cycles) / clock;
    row.throughput = clock * 1e6 * hd.throughput;
    rows.push_back(row);
  }
  {
    PerfRow row;
    row.component = "total";
    row.config = "clock_mhz=" + to_shortest(clock);
    row.cycles = nn.total + hd.per_sample_cycles;
    row.us = static_cast<double>(row.cycles) / clock;
    row.throughput = std::min(rows[0].throughput, rows[1].throughput);
    rows.push_back(row);
  }
  return rows;
}

std::string perf_report_csv(const std::vector<PerfRow>& rows) {
  std::string out = "component,config,cycles,us,throughput\n";
  for (const auto& row : rows) {
    out += row.component + "," + row.config + "," + to_shortest(row.cycles) + "," +
           to_shortest(row.us) + "," + to_shortest(row.throughput) + "\n";
  }
  return out;
}

std::string perf_report_text(const std::vector<PerfRow>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    out << row.component << " [" << row.config << "]: " << row.cycles << " cycles, " << row.us
        << " us, " << row.throughput << " samples/s\n";
  }
  return out.str();
}

}  // namespace syhd
