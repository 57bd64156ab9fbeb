#include "syhd/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace syhd {

namespace {

constexpr char kMagic[4] = {'S', 'Y', 'H', 'D'};
constexpr std::uint64_t kFnvBasis = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

struct Writer {
  std::vector<std::uint8_t> bytes;

  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes.insert(bytes.end(), p, p + n);
  }
  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw ParseError("model file ends inside a field");
  }
  std::uint8_t u8() {
    need(1);
    return bytes[pos++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
};

void write_hypervector(Writer& w, const Hypervector& hv) {
  for (const std::uint64_t word : hv.words()) w.u64(word);
}

Hypervector read_hypervector(Reader& r, std::size_t dim) {
  Hypervector hv(dim);
  for (auto& word : hv.words()) word = r.u64();
  hv.mask_tail();
  return hv;
}

void write_item_memory(Writer& w, const ItemMemory& mem) {
  w.u64(mem.feature_count());
  w.u64(mem.dim());
  w.u32(static_cast<std::uint32_t>(mem.levels()));
  w.u64(mem.flip_count());
  w.u64(mem.seed());
  w.u8(mem.has_quantizer() ? 1 : 0);
  if (mem.has_quantizer()) {
    const Quantizer& q = mem.quantizer();
    for (std::size_t j = 0; j < q.dim(); ++j) {
      w.f64(q.lo[j]);
      w.f64(q.hi[j]);
    }
  }
  for (const auto& hv : mem.feature_seeds()) write_hypervector(w, hv);
  for (const auto& hv : mem.level_table()) write_hypervector(w, hv);
}

ItemMemory read_item_memory(Reader& r) {
  const std::uint64_t dl = r.u64();
  const std::uint64_t dh = r.u64();
  const std::uint32_t q = r.u32();
  const std::uint64_t p = r.u64();
  const std::uint64_t seed = r.u64();
  if (dl == 0 || dh == 0 || q < 2) throw ParseError("item memory header is invalid");
  if (p != dh / q) throw ParseError("item memory flip count disagrees with dims");
  Quantizer quant;
  if (r.u8()) {
    quant.q = static_cast<int>(q);
    quant.lo.resize(dl);
    quant.hi.resize(dl);
    for (std::uint64_t j = 0; j < dl; ++j) {
      quant.lo[j] = r.f64();
      quant.hi[j] = r.f64();
    }
  }
  std::vector<Hypervector> seeds;
  seeds.reserve(dl);
  for (std::uint64_t j = 0; j < dl; ++j) seeds.push_back(read_hypervector(r, dh));
  std::vector<Hypervector> levels;
  levels.reserve(q);
  for (std::uint32_t k = 0; k < q; ++k) levels.push_back(read_hypervector(r, dh));
  return ItemMemoryAccess::assemble(seed, dh, static_cast<int>(q), std::move(seeds),
                                    std::move(levels), std::move(quant));
}

void write_hd_model(Writer& w, const HdModel& model, std::span<const long long> label_values) {
  const auto c = static_cast<std::uint32_t>(model.class_count());
  w.u32(c);
  for (const std::uint64_t n : model.class_counts()) w.u64(n);
  for (const auto& row : model.accumulators()) {
    for (const std::uint32_t v : row) w.u32(v);
  }
  w.u32(static_cast<std::uint32_t>(label_values.size()));
  for (const long long v : label_values) w.i64(v);
}

void read_hd_model(Reader& r, ItemMemory mem, HdModel& out, std::vector<long long>& label_values) {
  const std::uint32_t c = r.u32();
  if (c == 0) throw ParseError("classifier section has zero classes");
  std::vector<std::uint64_t> counts(c);
  for (auto& n : counts) n = r.u64();
  std::vector<std::vector<std::uint32_t>> acc(c, std::vector<std::uint32_t>(mem.dim()));
  for (auto& row : acc) {
    for (auto& v : row) v = r.u32();
  }
  const std::uint32_t lv = r.u32();
  if (lv != 0 && lv != c) throw ParseError("label value table size disagrees with class count");
  label_values.resize(lv);
  for (auto& v : label_values) v = r.i64();
  out = HdModelAccess::assemble(std::move(mem), std::move(counts), std::move(acc));
}

void write_mlp(Writer& w, const MlpModel& model) {
  const MlpArch& arch = model.arch();
  w.u64(arch.input_dim);
  w.u32(static_cast<std::uint32_t>(arch.feature_widths.size()));
  for (const std::size_t width : arch.feature_widths) w.u64(width);
  w.u64(arch.class_count);
  const auto write_layer = [&w](const DenseLayer& layer) {
    for (const double v : layer.weights.data()) w.f32(static_cast<float>(v));
    for (const double v : layer.biases) w.f32(static_cast<float>(v));
  };
  for (const auto& layer : model.layers()) write_layer(layer);
  write_layer(model.head());
  w.f32(static_cast<float>(model.alpha()));
  const Standardizer& s = model.standardizer();
  for (const double v : s.mean) w.f64(v);
  for (const double v : s.scale) w.f64(v);
  w.u8(model.has_codec() ? 1 : 0);
  if (model.has_codec()) {
    const CodecSpec& spec = model.codec_spec();
    w.u64(spec.dh);
    w.u32(static_cast<std::uint32_t>(spec.q));
    w.u64(spec.seed);
  }
  const TrainConfig& cfg = model.config();
  w.u32(static_cast<std::uint32_t>(cfg.epochs));
  w.u32(static_cast<std::uint32_t>(cfg.batch_size));
  w.u32(static_cast<std::uint32_t>(cfg.steps_per_epoch));
  w.f64(cfg.l2_coeff);
  w.f64(cfg.max_lr);
  w.f64(cfg.momentum);
  w.u64(cfg.rng_seed);
  w.u8(cfg.standardize ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(model.loss_history().size()));
  for (const double v : model.loss_history()) w.f64(v);
}

MlpModel read_mlp(Reader& r, const ItemMemory& imem) {
  MlpArch arch;
  arch.input_dim = r.u64();
  const std::uint32_t nlayers = r.u32();
  if (nlayers == 0) throw ParseError("extractor section has zero layers");
  for (std::uint32_t i = 0; i < nlayers; ++i) arch.feature_widths.push_back(r.u64());
  arch.class_count = r.u64();
  arch.validate();

  const auto read_layer = [&r](std::size_t d_out, std::size_t d_in) {
    DenseLayer layer(d_out, d_in);
    for (double& v : layer.weights.data()) v = static_cast<double>(r.f32());
    for (double& v : layer.biases) v = static_cast<double>(r.f32());
    return layer;
  };
  std::vector<DenseLayer> layers;
  std::size_t in_dim = arch.input_dim;
  for (const std::size_t width : arch.feature_widths) {
    layers.push_back(read_layer(width, in_dim));
    in_dim = width;
  }
  DenseLayer head = read_layer(arch.class_count, arch.feature_dim());
  const double alpha = static_cast<double>(r.f32());

  Standardizer std_;
  std_.mean.resize(arch.input_dim);
  std_.scale.resize(arch.input_dim);
  for (double& v : std_.mean) v = r.f64();
  for (double& v : std_.scale) v = r.f64();

  std::optional<ItemMemory> codec;
  CodecSpec spec;
  if (r.u8()) {
    spec.dh = r.u64();
    spec.q = static_cast<int>(r.u32());
    spec.seed = r.u64();
    if (spec.dh != imem.dim() || spec.q != imem.levels() || spec.seed != imem.seed()) {
      throw ParseError("codec spec disagrees with the stored item memory");
    }
    codec = imem;  // quantizer is rebuilt from alpha on every forward pass
  }

  TrainConfig cfg;
  cfg.epochs = static_cast<int>(r.u32());
  cfg.batch_size = static_cast<int>(r.u32());
  cfg.steps_per_epoch = static_cast<int>(r.u32());
  cfg.l2_coeff = r.f64();
  cfg.max_lr = r.f64();
  cfg.momentum = r.f64();
  cfg.rng_seed = r.u64();
  cfg.standardize = r.u8() != 0;

  std::vector<double> losses(r.u32());
  for (double& v : losses) v = r.f64();

  return MlpModelAccess::assemble(std::move(arch), std::move(layers), std::move(head), alpha,
                                  std::move(std_), std::move(codec), spec, cfg,
                                  std::move(losses));
}

void append_section(Writer& w, const char tag[4], const std::vector<std::uint8_t>& payload) {
  w.raw(tag, 4);
  w.u64(payload.size());
  w.raw(payload.data(), payload.size());
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kHdl: return "hdl";
    case ModelKind::kNnHdl: return "nn-hdl";
    case ModelKind::kSynergic: return "synergic";
  }
  throw std::invalid_argument("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "hdl") return ModelKind::kHdl;
  if (name == "nn-hdl" || name == "nn_hdl") return ModelKind::kNnHdl;
  if (name == "synergic") return ModelKind::kSynergic;
  throw std::invalid_argument("unknown model kind '" + name + "' (hdl | nn-hdl | synergic)");
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = kFnvBasis;
  for (const std::uint8_t b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
  return h;
}

std::vector<std::uint8_t> serialize_model(const ModelBundle& bundle) {
  const bool wants_mlp = bundle.kind != ModelKind::kHdl;
  if (wants_mlp != bundle.mlp.has_value()) {
    throw std::invalid_argument("model kind and extractor presence disagree");
  }
  if (bundle.kind == ModelKind::kSynergic && !bundle.mlp->has_codec()) {
    throw std::invalid_argument("synergic model requires a codec-bearing extractor");
  }
  if (bundle.kind == ModelKind::kNnHdl && bundle.mlp->has_codec()) {
    throw std::invalid_argument("nn-hdl model must not carry a codec");
  }
  if (!bundle.label_values.empty() &&
      bundle.label_values.size() != static_cast<std::size_t>(bundle.hd.class_count())) {
    throw std::invalid_argument("label value table size disagrees with class count");
  }

  Writer w;
  w.raw(kMagic, 4);
  w.u16(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(bundle.kind));
  w.u8(wants_mlp ? 3 : 2);  // section count

  Writer imem;
  write_item_memory(imem, bundle.hd.item_memory());
  append_section(w, "IMEM", imem.bytes);

  Writer hdmd;
  write_hd_model(hdmd, bundle.hd, bundle.label_values);
  append_section(w, "HDMD", hdmd.bytes);

  if (wants_mlp) {
    Writer mlpm;
    write_mlp(mlpm, *bundle.mlp);
    append_section(w, "MLPM", mlpm.bytes);
  }

  w.u64(fnv1a64(w.bytes));
  return std::move(w.bytes);
}

ModelBundle deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw BadMagicError("not a model file (bad magic)");
  }
  Reader r{bytes, 4};
  const std::uint16_t version = r.u16();
  if (version != kModelFormatVersion) {
    throw BadVersionError("unsupported model format version " + std::to_string(version) +
                          " (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  if (bytes.size() < 4 + 2 + 1 + 1 + 8) throw BadChecksumError("model file truncated");
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) {
    stored |= static_cast<std::uint64_t>(bytes[bytes.size() - 8 + i]) << (8 * i);
  }
  if (fnv1a64(bytes.subspan(0, bytes.size() - 8)) != stored) {
    throw BadChecksumError("model file checksum mismatch");
  }

  ModelBundle bundle;
  const std::uint8_t kind = r.u8();
  if (kind < 1 || kind > 3) throw ParseError("unknown model kind byte");
  bundle.kind = static_cast<ModelKind>(kind);
  const std::uint8_t sections = r.u8();

  std::optional<ItemMemory> imem;
  bool have_hd = false;
  std::vector<std::uint8_t> mlp_payload;
  const std::size_t payload_end = bytes.size() - 8;
  for (std::uint8_t s = 0; s < sections; ++s) {
    r.need(12);
    char tag[5] = {};
    std::memcpy(tag, bytes.data() + r.pos, 4);
    r.pos += 4;
    const std::uint64_t len = r.u64();
    if (r.pos + len > payload_end) throw ParseError("section overruns the file");
    Reader section{bytes.subspan(r.pos, len), 0};
    const std::string name(tag);
    if (name == "IMEM") {
      imem = read_item_memory(section);
    } else if (name == "HDMD") {
      if (!imem) throw ParseError("classifier section precedes item memory");
      read_hd_model(section, *imem, bundle.hd, bundle.label_values);
      have_hd = true;
    } else if (name == "MLPM") {
      if (!imem) throw ParseError("extractor section precedes item memory");
      bundle.mlp = read_mlp(section, *imem);
    } else {
      throw ParseError("unknown section tag '" + name + "'");
    }
    if (section.pos != section.bytes.size()) {
      throw ParseError("section '" + name + "' has trailing bytes");
    }
    r.pos += len;
  }
  if (r.pos != payload_end) throw ParseError("trailing bytes after the last section");
  if (!have_hd) throw ParseError("model file has no classifier section");
  const bool wants_mlp = bundle.kind != ModelKind::kHdl;
  if (wants_mlp != bundle.mlp.has_value()) {
    throw ParseError("model kind and stored sections disagree");
  }
  return bundle;
}

void save_model(const std::string& path, const ModelBundle& bundle) {
  const auto bytes = serialize_model(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path);
  return deserialize_model(bytes);
}

}  // namespace syhd
