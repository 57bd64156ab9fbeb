#pragma once

// Experiment orchestration: the three model kinds (plain HD learning, NN
// followed by HD, and the encoder-aware flow where the codec sits inside NN
// training), the incremental-learning run, and seed sweeps. Every run is a
// deterministic function of (spec, data); repetition seeds derive from the
// master seed by a fixed rule.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "syhd/dataset.hpp"
#include "syhd/mlp.hpp"
#include "syhd/model_io.hpp"

namespace syhd {

struct ExperimentSpec {
  ModelKind kind = ModelKind::kSynergic;
  std::size_t dh = 16;
  int q = 4;
  std::size_t dnn = 0;  // width of the feature layers; 0 means "input width"
  TrainConfig train;
  double ratio = 1.0;  // initial-data fraction for incremental runs
  std::uint64_t seed = 1;
  int repetitions = 1;
};

struct RunResult {
  double accuracy = 0.0;
  ModelBundle bundle;
  double wall_seconds = 0.0;  // printed, never written into result files
};

// Two feature layers of the same width, per the reference setup.
MlpArch default_arch(std::size_t dl, std::size_t dnn, int class_count);

// Builds the model for spec.kind without evaluating it.
ModelBundle train_bundle(const Dataset& train, const ExperimentSpec& spec);

RunResult run_hdl(const Dataset& train, const Dataset& test, const ExperimentSpec& spec);
RunResult run_nn_hdl(const Dataset& train, const Dataset& test, const ExperimentSpec& spec);
RunResult run_synergic(const Dataset& train, const Dataset& test, const ExperimentSpec& spec);
// Dispatch on spec.kind.
RunResult run_experiment(const Dataset& train, const Dataset& test, const ExperimentSpec& spec);

// Deterministic per-class split: every class contributes
// max(1, llround(ratio * class_size)) samples to the initial fraction.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, int class_count, double ratio, std::uint64_t seed);

// Trains on the initial fraction, then absorbs the remainder one-pass. The
// extractor (when present) is trained on the initial fraction only and stays
// frozen through the update. For plain HD the same item memory is used to
// train once on the full data and the two models are asserted bit-equal.
RunResult run_incremental(const Dataset& train, const Dataset& test, const ExperimentSpec& spec);

struct SeedRun {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

struct SeedSweepResult {
  std::vector<SeedRun> runs;
  double spread = 0.0;  // max - min accuracy
};

// Runs the spec once per seed. The k-count form derives the seeds from
// spec.seed (repetition 0 runs the master seed itself).
SeedSweepResult seed_sweep(const Dataset& train, const Dataset& test, const ExperimentSpec& spec,
                           std::span<const std::uint64_t> seeds);
SeedSweepResult seed_sweep(const Dataset& train, const Dataset& test, const ExperimentSpec& spec,
                           int k);

std::uint64_t repetition_seed(std::uint64_t master, int repetition);

struct ExperimentResult {
  std::vector<SeedRun> repetitions;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double wall_seconds = 0.0;  // printed, never written into result files
  ModelBundle last_bundle;
};

ExperimentResult run_repeated(const Dataset& train, const Dataset& test,
                              const ExperimentSpec& spec);

// Predictions in dense label space; evaluate compares against test.y.
std::vector<int> predict_bundle(const ModelBundle& bundle, const Matrix& x);
double evaluate_bundle(const ModelBundle& bundle, const Dataset& test);

// One-pass fine-tuning of a saved model with new data (hdl and synergic).
void finetune_bundle(ModelBundle& bundle, const Dataset& extra);

}  // namespace syhd
