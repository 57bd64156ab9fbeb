#include "syhd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "syhd/rng.hpp"

namespace syhd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_train(const Dataset& train) {
  if (train.y.empty()) {
    throw std::invalid_argument("dataset must have aligned labels (align_labels first)");
  }
}

void check_split(const Dataset& train, const Dataset& test) {
  check_train(train);
  check_train(test);
  if (train.feature_count() != test.feature_count()) {
    throw std::invalid_argument("train and test feature counts differ");
  }
  if (train.class_count != test.class_count) {
    throw std::invalid_argument("train and test label mappings differ");
  }
}

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto src = x.row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::vector<int> gather_labels(std::span<const int> y, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

ExperimentSpec with_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  ExperimentSpec out = spec;
  out.seed = seed;
  out.train.rng_seed = seed;
  return out;
}

TrainConfig seeded_config(const ExperimentSpec& spec) {
  TrainConfig cfg = spec.train;
  cfg.rng_seed = spec.seed;
  return cfg;
}

ModelBundle build_hdl(const Dataset& train, const ExperimentSpec& spec) {
  ItemMemory mem = ItemMemory::generate(train.feature_count(), spec.dh, spec.q, spec.seed);
  mem.set_quantizer(Quantizer::fit(train.x, spec.q));
  ModelBundle bundle;
  bundle.kind = ModelKind::kHdl;
  bundle.hd = HdModel::train(train.x, train.y, std::move(mem), train.class_count);
  bundle.label_values = train.label_values;
  return bundle;
}

ModelBundle build_nn_hdl(const Dataset& train, const ExperimentSpec& spec) {
  const MlpArch arch = default_arch(train.feature_count(), spec.dnn, train.class_count);
  MlpModel mlp = train_mlp(train.x, train.y, arch, std::nullopt, seeded_config(spec));

  const Matrix f_train = mlp.extract_features(train.x);
  ItemMemory mem = ItemMemory::generate(arch.feature_dim(), spec.dh, spec.q, spec.seed);
  mem.set_quantizer(Quantizer::fit(f_train, spec.q));

  ModelBundle bundle;
  bundle.kind = ModelKind::kNnHdl;
  bundle.hd = HdModel::train(f_train, train.y, std::move(mem), train.class_count);
  bundle.mlp = std::move(mlp);
  bundle.label_values = train.label_values;
  return bundle;
}

ModelBundle build_synergic(const Dataset& train, const ExperimentSpec& spec) {
  const MlpArch arch = default_arch(train.feature_count(), spec.dnn, train.class_count);
  const CodecSpec codec{spec.dh, spec.q, spec.seed};
  MlpModel mlp = train_mlp(train.x, train.y, arch, codec, seeded_config(spec));

  // The HD classifier reuses the codec's item memory, quantizing features
  // over the same [0, alpha] range the extractor was trained against.
  const Matrix f_train = mlp.extract_features(train.x);
  ItemMemory mem = mlp.codec_memory_with_range();

  ModelBundle bundle;
  bundle.kind = ModelKind::kSynergic;
  bundle.hd = HdModel::train(f_train, train.y, std::move(mem), train.class_count);
  bundle.mlp = std::move(mlp);
  bundle.label_values = train.label_values;
  return bundle;
}

RunResult timed_run(const Dataset& train, const Dataset& test, const ExperimentSpec& spec,
                    ModelBundle (*build)(const Dataset&, const ExperimentSpec&)) {
  check_split(train, test);
  const auto start = Clock::now();
  RunResult out;
  out.bundle = build(train, spec);
  out.accuracy = evaluate_bundle(out.bundle, test);
  out.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace

MlpArch default_arch(std::size_t dl, std::size_t dnn, int class_count) {
  const std::size_t width = dnn == 0 ? dl : dnn;
  MlpArch arch;
  arch.input_dim = dl;
  arch.feature_widths = {width, width};
  arch.class_count = static_cast<std::size_t>(class_count);
  return arch;
}

ModelBundle train_bundle(const Dataset& train, const ExperimentSpec& spec) {
  check_train(train);
  switch (spec.kind) {
    case ModelKind::kHdl: return build_hdl(train, spec);
    case ModelKind::kNnHdl: return build_nn_hdl(train, spec);
    case ModelKind::kSynergic: return build_synergic(train, spec);
  }
  throw std::invalid_argument("unknown model kind");
}

RunResult run_hdl(const Dataset& train, const Dataset& test, const ExperimentSpec& spec) {
  return timed_run(train, test, spec, &build_hdl);
}

RunResult run_nn_hdl(const Dataset& train, const Dataset& test, const ExperimentSpec& spec) {
  return timed_run(train, test, spec, &build_nn_hdl);
}

RunResult run_synergic(const Dataset& train, const Dataset& test, const ExperimentSpec& spec) {
  return timed_run(train, test, spec, &build_synergic);
}

RunResult run_experiment(const Dataset& train, const Dataset& test, const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ModelKind::kHdl: return run_hdl(train, test, spec);
    case ModelKind::kNnHdl: return run_nn_hdl(train, test, spec);
    case ModelKind::kSynergic: return run_synergic(train, test, spec);
  }
  throw std::invalid_argument("unknown model kind");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, int class_count, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0) || ratio > 1.0) throw std::invalid_argument("ratio must be in (0, 1]");
  std::vector<std::vector<std::size_t>> per_class(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || label > class_count) throw std::invalid_argument("label out of range");
    per_class[static_cast<std::size_t>(label - 1)].push_back(i);
  }
  SplitMix64 rng(SplitMix64::derive(seed, kStreamSplit));
  std::vector<std::size_t> initial;
  std::vector<std::size_t> rest;
  for (auto& members : per_class) {
    if (members.empty()) continue;
    shuffle(members, rng);
    const auto take = std::min<std::size_t>(
        members.size(),
        static_cast<std::size_t>(std::max<long long>(
            1, std::llround(ratio * static_cast<double>(members.size())))));
    initial.insert(initial.end(), members.begin(), members.begin() + take);
    rest.insert(rest.end(), members.begin() + take, members.end());
  }
  // Sorted order keeps downstream runs independent of class iteration order.
  std::sort(initial.begin(), initial.end());
  std::sort(rest.begin(), rest.end());
  return {std::move(initial), std::move(rest)};
}

RunResult run_incremental(const Dataset& train, const Dataset& test, const ExperimentSpec& spec) {
  check_split(train, test);
  const auto start = Clock::now();
  const auto [init_idx, rest_idx] =
      stratified_split(train.y, train.class_count, spec.ratio, spec.seed);
  const Matrix x_init = gather_rows(train.x, init_idx);
  const std::vector<int> y_init = gather_labels(train.y, init_idx);
  const Matrix x_rest = gather_rows(train.x, rest_idx);
  const std::vector<int> y_rest = gather_labels(train.y, rest_idx);

  RunResult out;
  out.bundle.label_values = train.label_values;

  if (spec.kind == ModelKind::kHdl) {
    // The item memory (including its quantizer) is fixed up front; with it
    // held fixed, the split cannot matter, which is asserted bit-exactly.
    ItemMemory mem = ItemMemory::generate(train.feature_count(), spec.dh, spec.q, spec.seed);
    mem.set_quantizer(Quantizer::fit(train.x, spec.q));
    HdModel incremental = HdModel::train(x_init, y_init, mem, train.class_count);
    incremental.update(x_rest, y_rest);
    const HdModel oneshot = HdModel::train(train.x, train.y, mem, train.class_count);
    if (!(incremental == oneshot)) {
      throw std::logic_error("incremental and one-shot hd models diverged");
    }
    out.bundle.kind = ModelKind::kHdl;
    out.bundle.hd = std::move(incremental);
    out.accuracy = evaluate_bundle(out.bundle, test);
    out.wall_seconds = seconds_since(start);
    return out;
  }

  if (spec.kind == ModelKind::kNnHdl) {
    throw std::invalid_argument("incremental runs support hdl and synergic kinds");
  }

  // Synergic: the extractor sees only the initial fraction and is frozen
  // before the update pass, which reads each remaining sample once.
  const MlpArch arch = default_arch(train.feature_count(), spec.dnn, train.class_count);
  const CodecSpec codec{spec.dh, spec.q, spec.seed};
  MlpModel mlp = train_mlp(x_init, y_init, arch, codec, seeded_config(spec));

  const Matrix f_init = mlp.extract_features(x_init);
  ItemMemory mem = mlp.codec_memory_with_range();
  HdModel hd = HdModel::train(f_init, y_init, std::move(mem), train.class_count);
  if (!rest_idx.empty()) {
    const Matrix f_rest = mlp.extract_features(x_rest);
    hd.update(f_rest, y_rest);
  }
  out.bundle.kind = ModelKind::kSynergic;
  out.bundle.hd = std::move(hd);
  out.bundle.mlp = std::move(mlp);
  out.accuracy = evaluate_bundle(out.bundle, test);
  out.wall_seconds = seconds_since(start);
  return out;
}

std::uint64_t repetition_seed(std::uint64_t master, int repetition) {
  if (repetition == 0) return master;
  return SplitMix64::derive(master, kStreamRepetition + static_cast<std::uint64_t>(repetition));
}

SeedSweepResult seed_sweep(const Dataset& train, const Dataset& test, const ExperimentSpec& spec,
                           std::span<const std::uint64_t> seeds) {
  if (seeds.size() < 2) throw std::invalid_argument("seed sweep needs at least 2 seeds");
  SeedSweepResult out;
  double lo = 1.0;
  double hi = 0.0;
  for (const std::uint64_t seed : seeds) {
    const RunResult run = run_experiment(train, test, with_seed(spec, seed));
    out.runs.push_back({seed, run.accuracy});
    lo = std::min(lo, run.accuracy);
    hi = std::max(hi, run.accuracy);
  }
  out.spread = hi - lo;
  return out;
}

SeedSweepResult seed_sweep(const Dataset& train, const Dataset& test, const ExperimentSpec& spec,
                           int k) {
  if (k < 2) throw std::invalid_argument("seed sweep needs at least 2 seeds");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < k; ++i) seeds.push_back(repetition_seed(spec.seed, i));
  return seed_sweep(train, test, spec, seeds);
}

ExperimentResult run_repeated(const Dataset& train, const Dataset& test,
                              const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  const auto start = Clock::now();
  ExperimentResult out;
  double sum = 0.0;
  out.min = 1.0;
  out.max = 0.0;
  for (int r = 0; r < spec.repetitions; ++r) {
    const std::uint64_t seed = repetition_seed(spec.seed, r);
    RunResult run = spec.ratio < 1.0 ? run_incremental(train, test, with_seed(spec, seed))
                                     : run_experiment(train, test, with_seed(spec, seed));
    out.repetitions.push_back({seed, run.accuracy});
    sum += run.accuracy;
    out.min = std::min(out.min, run.accuracy);
    out.max = std::max(out.max, run.accuracy);
    if (r + 1 == spec.repetitions) out.last_bundle = std::move(run.bundle);
  }
  out.mean = sum / static_cast<double>(spec.repetitions);
  out.wall_seconds = seconds_since(start);
  return out;
}

std::vector<int> predict_bundle(const ModelBundle& bundle, const Matrix& x) {
  if (bundle.kind == ModelKind::kHdl) return bundle.hd.predict_batch(x);
  return bundle.hd.predict_batch(bundle.mlp->extract_features(x));
}

double evaluate_bundle(const ModelBundle& bundle, const Dataset& test) {
  if (test.y.empty()) throw std::invalid_argument("test set has no aligned labels");
  if (bundle.kind == ModelKind::kHdl) return bundle.hd.evaluate(test.x, test.y);
  return bundle.hd.evaluate(bundle.mlp->extract_features(test.x), test.y);
}

void finetune_bundle(ModelBundle& bundle, const Dataset& extra) {
  if (extra.y.empty()) throw std::invalid_argument("finetune data has no aligned labels");
  if (extra.class_count > bundle.hd.class_count()) {
    throw std::invalid_argument("finetune data has labels outside the model's classes");
  }
  if (bundle.kind == ModelKind::kNnHdl) {
    throw std::invalid_argument("finetune supports hdl and synergic kinds");
  }
  if (bundle.kind == ModelKind::kHdl) {
    bundle.hd.update(extra.x, extra.y);
  } else {
    bundle.hd.update(bundle.mlp->extract_features(extra.x), extra.y);
  }
}

}  // namespace syhd
