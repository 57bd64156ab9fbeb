#pragma once

// From-scratch MLP feature extractor: dense layers with ReLU, a final PACT
// clipping activation with learnable alpha, an optional HD codec pass-through
// between the features and the classifier head, softmax cross-entropy with l2
// on weights and alpha, SGD with momentum, and a one-cycle LR schedule.
//
// The codec forward is quantize -> encode -> decode -> dequantize over the
// PACT range [0, alpha]; its backward is the identity (straight-through), so
// the extractor learns features that survive the HD round trip.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "syhd/item_memory.hpp"
#include "syhd/matrix.hpp"

namespace syhd {

struct TrainConfig {
  int epochs = 120;
  int batch_size = 256;
  double l2_coeff = 1e-4;
  double max_lr = 0.01;
  int steps_per_epoch = 0;  // 0 resolves to ceil(n / batch) at training time
  double momentum = 0.9;
  std::uint64_t rng_seed = 1;
  bool standardize = true;

  int total_steps() const { return epochs * steps_per_epoch; }
  bool operator==(const TrainConfig&) const = default;
};

// Piecewise-linear one-cycle schedule: max_lr/25 up to max_lr over the first
// 45% of steps, back down to max_lr/25 over the next 45%, then down to
// max_lr/2500 at the final step.
double one_cycle_lr(int step, int total_steps, double max_lr);

struct DenseLayer {
  Matrix weights;              // d_out x d_in
  std::vector<double> biases;  // d_out

  DenseLayer() = default;
  DenseLayer(std::size_t d_out, std::size_t d_in) : weights(d_out, d_in), biases(d_out, 0.0) {}
  std::size_t out_dim() const { return weights.rows(); }
  std::size_t in_dim() const { return weights.cols(); }
  bool operator==(const DenseLayer&) const = default;
};

struct MlpArch {
  std::size_t input_dim = 0;
  // Widths of the feature-extraction layers; ReLU after each but the last,
  // PACT after the last. The last width is d_nn.
  std::vector<std::size_t> feature_widths;
  std::size_t class_count = 0;

  std::size_t feature_dim() const { return feature_widths.back(); }
  void validate() const;
  bool operator==(const MlpArch&) const = default;
};

struct CodecSpec {
  std::size_t dh = 16;
  int q = 4;
  std::uint64_t seed = 1;
  bool operator==(const CodecSpec&) const = default;
};

// Per-feature affine input normalization fitted on the training split.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // x' = (x - mean) / scale; constant columns get scale 1

  static Standardizer fit(const Matrix& x);
  static Standardizer identity(std::size_t dim);
  Matrix apply(const Matrix& x) const;
  bool operator==(const Standardizer&) const = default;
};

// Same shapes as the parameters they correspond to.
struct MlpGradients {
  std::vector<DenseLayer> layers;
  DenseLayer head;
  double alpha = 0.0;
};

class MlpModel {
 public:
  MlpModel() = default;

  // He-uniform weights (variance 2/fan_in), zero biases, alpha = 10.
  static MlpModel init(const MlpArch& arch, std::uint64_t seed);

  void attach_codec(const CodecSpec& spec);
  bool has_codec() const { return codec_.has_value(); }
  const CodecSpec& codec_spec() const { return codec_spec_; }
  // The codec's item memory with quantizer set to the current [0, alpha].
  ItemMemory codec_memory_with_range() const;

  // Full forward pass; logits row per input row.
  Matrix logits(const Matrix& x) const;
  // Post-PACT activations (before the codec), in [0, alpha].
  Matrix extract_features(const Matrix& x) const;
  // Single-sample convenience: (features, logits).
  std::pair<std::vector<double>, std::vector<double>> forward_one(std::span<const double> x) const;

  // Mean cross-entropy over the batch + l2 * (sum of squared weights and
  // alpha). Labels are in [1, class_count].
  double batch_loss(const Matrix& x, std::span<const int> y) const;
  // Loss and analytic gradients of the same objective; the codec segment
  // backpropagates identically (straight-through).
  std::pair<double, MlpGradients> batch_gradients(const Matrix& x, std::span<const int> y) const;

  double evaluate(const Matrix& x, std::span<const int> y) const;

  const MlpArch& arch() const { return arch_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  const DenseLayer& head() const { return head_; }
  double alpha() const { return alpha_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const std::vector<double>& loss_history() const { return loss_history_; }
  const TrainConfig& config() const { return config_; }
  // The config is metadata (it also carries l2_coeff into the loss); settable
  // so tests can probe the objective at chosen coefficients.
  void set_config(const TrainConfig& config) { config_ = config; }

  // Flat view over every trainable scalar, fixed order: feature layers
  // (weights then biases), head, alpha. Used by the finite-difference tests
  // and the optimizer.
  std::vector<double*> parameter_view();
  std::vector<double> gradient_flat(const MlpGradients& g) const;

  bool operator==(const MlpModel&) const = default;

 private:
  struct ForwardCache;
  void run_forward(const Matrix& x, ForwardCache& cache) const;

  MlpArch arch_;
  std::vector<DenseLayer> layers_;
  DenseLayer head_;
  double alpha_ = 10.0;
  Standardizer standardizer_;
  std::optional<ItemMemory> codec_;  // quantizer applied per-forward from alpha
  CodecSpec codec_spec_;
  TrainConfig config_;
  std::vector<double> loss_history_;  // one mean loss per epoch

  friend MlpModel train_mlp(const Matrix&, std::span<const int>, const MlpArch&,
                            const std::optional<CodecSpec>&, const TrainConfig&);
  friend struct MlpModelAccess;
};

// Mini-batch SGD with momentum under the one-cycle schedule. Shuffling,
// init, and the codec item memory all derive from config.rng_seed, so equal
// inputs give bit-identical models and loss histories.
MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpArch& arch,
                   const std::optional<CodecSpec>& codec, const TrainConfig& config);

struct MlpModelAccess {
  static MlpModel assemble(MlpArch arch, std::vector<DenseLayer> layers, DenseLayer head,
                           double alpha, Standardizer standardizer,
                           std::optional<ItemMemory> codec, CodecSpec codec_spec,
                           TrainConfig config, std::vector<double> loss_history);
};

}  // namespace syhd
