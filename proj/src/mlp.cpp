#include "syhd/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "syhd/errors.hpp"
#include "syhd/rng.hpp"

namespace syhd {

namespace {

constexpr double kAlphaInit = 10.0;
constexpr double kAlphaFloor = 1e-6;  // keeps the PACT bound positive

void check_finite(const Matrix& m, const std::string& where) {
  for (const double v : m.data()) {
    if (!std::isfinite(v)) throw NumericError(where + " produced a non-finite value");
  }
}

void check_labels(std::span<const int> y, std::size_t rows, std::size_t class_count) {
  if (y.size() != rows) throw std::invalid_argument("label count differs from row count");
  for (const int label : y) {
    if (label < 1 || label > static_cast<int>(class_count)) {
      throw std::invalid_argument("label " + std::to_string(label) + " outside [1, " +
                                  std::to_string(class_count) + "]");
    }
  }
}

// rows of x softmaxed in place; returns mean cross-entropy against y.
double softmax_cross_entropy(Matrix& x, std::span<const int> y) {
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      z += v;
    }
    for (double& v : row) v /= z;
    const double p = row[static_cast<std::size_t>(y[r] - 1)];
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(x.rows());
}

void add_bias(Matrix& m, const std::vector<double>& bias) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] += bias[c];
  }
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c];
  }
  return out;
}

double sum_squares(const Matrix& m) {
  double s = 0.0;
  for (const double v : m.data()) s += v * v;
  return s;
}

}  // namespace

double one_cycle_lr(int step, int total_steps, double max_lr) {
  if (total_steps < 1) throw std::invalid_argument("scheduler needs total_steps >= 1");
  if (step < 0 || step >= total_steps) {
    throw std::invalid_argument("scheduler step " + std::to_string(step) + " outside [0, " +
                                std::to_string(total_steps) + ")");
  }
  const double base = max_lr / 25.0;
  const double final_lr = max_lr / 2500.0;
  const long p1 = std::lround(0.45 * total_steps);
  const long p2 = std::lround(0.90 * total_steps);
  const long last = total_steps - 1;
  if (step <= p1 && p1 > 0) {
    return base + (max_lr - base) * static_cast<double>(step) / static_cast<double>(p1);
  }
  if (step <= p2) {
    if (p2 == p1) return max_lr;
    return max_lr - (max_lr - base) * static_cast<double>(step - p1) / static_cast<double>(p2 - p1);
  }
  if (last == p2) return final_lr;
  return base + (final_lr - base) * static_cast<double>(step - p2) / static_cast<double>(last - p2);
}

void MlpArch::validate() const {
  if (input_dim == 0) throw std::invalid_argument("input dim must be >= 1");
  if (feature_widths.empty()) throw std::invalid_argument("need at least one feature layer");
  for (const std::size_t w : feature_widths) {
    if (w == 0) throw std::invalid_argument("layer widths must be >= 1");
  }
  if (class_count < 2) throw std::invalid_argument("class count must be >= 2");
}

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() == 0) throw std::invalid_argument("standardizer fit on empty matrix");
  Standardizer s;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 0.0);
  const double n = static_cast<double>(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) s.mean[c] += row[c];
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = row[c] - s.mean[c];
      s.scale[c] += d * d;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / n);
    if (v == 0.0) v = 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.scale.assign(dim, 1.0);
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("standardizer dimension mismatch");
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < out.cols(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
  }
  return out;
}

MlpModel MlpModel::init(const MlpArch& arch, std::uint64_t seed) {
  arch.validate();
  MlpModel model;
  model.arch_ = arch;
  model.alpha_ = kAlphaInit;
  model.standardizer_ = Standardizer::identity(arch.input_dim);
  SplitMix64 rng(SplitMix64::derive(seed, kStreamWeights));
  std::size_t in_dim = arch.input_dim;
  for (const std::size_t width : arch.feature_widths) {
    DenseLayer layer(width, in_dim);
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim));
    for (double& w : layer.weights.data()) w = rng.next_double(-limit, limit);
    model.layers_.push_back(std::move(layer));
    in_dim = width;
  }
  model.head_ = DenseLayer(arch.class_count, arch.feature_dim());
  const double limit = std::sqrt(6.0 / static_cast<double>(arch.feature_dim()));
  for (double& w : model.head_.weights.data()) w = rng.next_double(-limit, limit);
  return model;
}

void MlpModel::attach_codec(const CodecSpec& spec) {
  codec_spec_ = spec;
  codec_ = ItemMemory::generate(arch_.feature_dim(), spec.dh, spec.q, spec.seed);
}

ItemMemory MlpModel::codec_memory_with_range() const {
  if (!codec_) throw std::logic_error("model has no codec");
  ItemMemory mem = *codec_;
  mem.set_uniform_range(0.0, alpha_);
  return mem;
}

struct MlpModel::ForwardCache {
  Matrix input;                // standardized batch
  std::vector<Matrix> pre;     // pre-activations per feature layer
  std::vector<Matrix> post;    // post-activations per feature layer
  Matrix head_in;              // codec output, or the features themselves
  Matrix logits;
};

void MlpModel::run_forward(const Matrix& x, ForwardCache& cache) const {
  if (x.cols() != arch_.input_dim) throw std::invalid_argument("input dimension mismatch");
  cache.input = standardizer_.apply(x);
  cache.pre.clear();
  cache.post.clear();
  const Matrix* in = &cache.input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = matmul_abt(*in, layers_[i].weights);
    add_bias(z, layers_[i].biases);
    check_finite(z, "feature layer " + std::to_string(i + 1));
    Matrix h = z;
    const bool last = i + 1 == layers_.size();
    for (double& v : h.data()) {
      v = last ? std::clamp(v, 0.0, alpha_) : std::max(v, 0.0);
    }
    cache.pre.push_back(std::move(z));
    cache.post.push_back(std::move(h));
    in = &cache.post.back();
  }
  const Matrix& features = cache.post.back();
  if (codec_) {
    ItemMemory mem = codec_memory_with_range();
    Matrix decoded(features.rows(), features.cols());
    for (std::size_t r = 0; r < features.rows(); ++r) {
      const auto rec = mem.reconstruct(features.row(r));
      std::copy(rec.begin(), rec.end(), decoded.row(r).begin());
    }
    cache.head_in = std::move(decoded);
  } else {
    cache.head_in = features;
  }
  cache.logits = matmul_abt(cache.head_in, head_.weights);
  add_bias(cache.logits, head_.biases);
  check_finite(cache.logits, "classifier head");
}

Matrix MlpModel::logits(const Matrix& x) const {
  ForwardCache cache;
  run_forward(x, cache);
  return std::move(cache.logits);
}

Matrix MlpModel::extract_features(const Matrix& x) const {
  ForwardCache cache;
  run_forward(x, cache);
  return std::move(cache.post.back());
}

std::pair<std::vector<double>, std::vector<double>> MlpModel::forward_one(
    std::span<const double> x) const {
  Matrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.row(0).begin());
  ForwardCache cache;
  run_forward(m, cache);
  const auto f = cache.post.back().row(0);
  const auto l = cache.logits.row(0);
  return {{f.begin(), f.end()}, {l.begin(), l.end()}};
}

double MlpModel::batch_loss(const Matrix& x, std::span<const int> y) const {
  check_labels(y, x.rows(), arch_.class_count);
  ForwardCache cache;
  run_forward(x, cache);
  double loss = softmax_cross_entropy(cache.logits, y);
  double reg = alpha_ * alpha_;
  for (const auto& layer : layers_) reg += sum_squares(layer.weights);
  reg += sum_squares(head_.weights);
  return loss + config_.l2_coeff * reg;
}

std::pair<double, MlpGradients> MlpModel::batch_gradients(const Matrix& x,
                                                          std::span<const int> y) const {
  check_labels(y, x.rows(), arch_.class_count);
  ForwardCache cache;
  run_forward(x, cache);

  const double inv_n = 1.0 / static_cast<double>(x.rows());
  double loss = softmax_cross_entropy(cache.logits, y);

  MlpGradients g;
  g.layers.reserve(layers_.size());
  for (const auto& layer : layers_) g.layers.emplace_back(layer.out_dim(), layer.in_dim());
  g.head = DenseLayer(head_.out_dim(), head_.in_dim());

  // d loss / d logits: (softmax - onehot) / n, using the probabilities left
  // in cache.logits by softmax_cross_entropy.
  Matrix delta = std::move(cache.logits);
  for (std::size_t r = 0; r < delta.rows(); ++r) {
    delta.row(r)[static_cast<std::size_t>(y[r] - 1)] -= 1.0;
  }
  for (double& v : delta.data()) v *= inv_n;

  g.head.weights = matmul_atb(delta, cache.head_in);
  g.head.biases = column_sums(delta);
  Matrix grad = matmul_ab(delta, head_.weights);  // d loss / d head input

  // Codec backward: straight-through, grad flows to the features unchanged.
  const Matrix& pact_pre = cache.pre.back();
  double alpha_grad = 0.0;
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    auto gr = grad.row(r);
    const auto zr = pact_pre.row(r);
    for (std::size_t c = 0; c < grad.cols(); ++c) {
      if (zr[c] >= alpha_) {
        alpha_grad += gr[c];
        gr[c] = 0.0;
      } else if (zr[c] <= 0.0) {
        gr[c] = 0.0;
      }
    }
  }
  g.alpha = alpha_grad;

  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Matrix& layer_in = i == 0 ? cache.input : cache.post[i - 1];
    g.layers[i].weights = matmul_atb(grad, layer_in);
    g.layers[i].biases = column_sums(grad);
    if (i == 0) break;
    grad = matmul_ab(grad, layers_[i].weights);
    const Matrix& pre = cache.pre[i - 1];
    for (std::size_t r = 0; r < grad.rows(); ++r) {
      auto gr = grad.row(r);
      const auto zr = pre.row(r);
      for (std::size_t c = 0; c < grad.cols(); ++c) {
        if (zr[c] <= 0.0) gr[c] = 0.0;
      }
    }
  }

  // l2 on weights and alpha (not biases).
  double reg = alpha_ * alpha_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    reg += sum_squares(layers_[i].weights);
    const auto& w = layers_[i].weights.data();
    auto& gw = g.layers[i].weights.data();
    for (std::size_t k = 0; k < w.size(); ++k) gw[k] += 2.0 * config_.l2_coeff * w[k];
  }
  reg += sum_squares(head_.weights);
  for (std::size_t k = 0; k < head_.weights.data().size(); ++k) {
    g.head.weights.data()[k] += 2.0 * config_.l2_coeff * head_.weights.data()[k];
  }
  g.alpha += 2.0 * config_.l2_coeff * alpha_;
  loss += config_.l2_coeff * reg;
  return {loss, std::move(g)};
}

double MlpModel::evaluate(const Matrix& x, std::span<const int> y) const {
  check_labels(y, x.rows(), arch_.class_count);
  if (x.rows() == 0) throw std::invalid_argument("evaluate on empty dataset");
  const Matrix out = logits(x);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto row = out.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    correct += static_cast<int>(best) + 1 == y[r];
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

std::vector<double*> MlpModel::parameter_view() {
  std::vector<double*> out;
  for (auto& layer : layers_) {
    for (double& w : layer.weights.data()) out.push_back(&w);
    for (double& b : layer.biases) out.push_back(&b);
  }
  for (double& w : head_.weights.data()) out.push_back(&w);
  for (double& b : head_.biases) out.push_back(&b);
  out.push_back(&alpha_);
  return out;
}

std::vector<double> MlpModel::gradient_flat(const MlpGradients& g) const {
  std::vector<double> out;
  for (const auto& layer : g.layers) {
    out.insert(out.end(), layer.weights.data().begin(), layer.weights.data().end());
    out.insert(out.end(), layer.biases.begin(), layer.biases.end());
  }
  out.insert(out.end(), g.head.weights.data().begin(), g.head.weights.data().end());
  out.insert(out.end(), g.head.biases.begin(), g.head.biases.end());
  out.push_back(g.alpha);
  return out;
}

MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpArch& arch,
                   const std::optional<CodecSpec>& codec, const TrainConfig& config) {
  arch.validate();
  check_labels(y, x.rows(), arch.class_count);
  if (x.rows() == 0) throw std::invalid_argument("train on empty dataset");
  if (config.epochs < 1 || config.batch_size < 1 || config.steps_per_epoch < 0 ||
      config.max_lr <= 0.0) {
    throw std::invalid_argument("training config values must be positive");
  }

  MlpModel model = MlpModel::init(arch, config.rng_seed);
  model.config_ = config;
  model.standardizer_ =
      config.standardize ? Standardizer::fit(x) : Standardizer::identity(arch.input_dim);
  if (codec) model.attach_codec(*codec);

  const std::size_t n = x.rows();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), n);
  const int spe = config.steps_per_epoch > 0
                      ? config.steps_per_epoch
                      : static_cast<int>((n + batch - 1) / batch);
  model.config_.steps_per_epoch = spe;  // persist the resolved value
  SplitMix64 shuffle_rng(SplitMix64::derive(config.rng_seed, kStreamShuffle));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, shuffle_rng);
  std::size_t cursor = 0;

  // Momentum buffers, aligned with parameter_view order.
  std::vector<double*> params = model.parameter_view();
  std::vector<double> velocity(params.size(), 0.0);

  Matrix xb(batch, x.cols());
  std::vector<int> yb(batch);
  const int total = config.epochs * spe;
  model.loss_history_.assign(static_cast<std::size_t>(config.epochs), 0.0);

  for (int step = 0; step < total; ++step) {
    if (cursor + batch > n) {
      shuffle(order, shuffle_rng);
      cursor = 0;
    }
    for (std::size_t i = 0; i < batch; ++i) {
      const std::size_t src = order[cursor + i];
      const auto row = x.row(src);
      std::copy(row.begin(), row.end(), xb.row(i).begin());
      yb[i] = y[src];
    }
    cursor += batch;

    auto [loss, grads] = model.batch_gradients(xb, yb);
    if (!std::isfinite(loss)) {
      throw NumericError("training diverged: non-finite loss at step " + std::to_string(step) +
                         " (epoch " + std::to_string(step / spe) + ")");
    }
    const double lr = one_cycle_lr(step, total, config.max_lr);
    const std::vector<double> flat = model.gradient_flat(grads);
    for (std::size_t k = 0; k < params.size(); ++k) {
      velocity[k] = config.momentum * velocity[k] + flat[k];
      *params[k] -= lr * velocity[k];
    }
    if (model.alpha_ < kAlphaFloor) model.alpha_ = kAlphaFloor;
    model.loss_history_[static_cast<std::size_t>(step / spe)] += loss / spe;
  }
  return model;
}

MlpModel MlpModelAccess::assemble(MlpArch arch, std::vector<DenseLayer> layers, DenseLayer head,
                                  double alpha, Standardizer standardizer,
                                  std::optional<ItemMemory> codec, CodecSpec codec_spec,
                                  TrainConfig config, std::vector<double> loss_history) {
  MlpModel model;
  model.arch_ = std::move(arch);
  model.layers_ = std::move(layers);
  model.head_ = std::move(head);
  model.alpha_ = alpha;
  model.standardizer_ = std::move(standardizer);
  model.codec_ = std::move(codec);
  model.codec_spec_ = codec_spec;
  model.config_ = std::move(config);
  model.loss_history_ = std::move(loss_history);
  return model;
}

}  // namespace syhd
