#include "syhd/hd_classifier.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace syhd {

HdModel HdModel::train(const Matrix& features, std::span<const int> labels, ItemMemory mem,
                       int class_count) {
  if (features.rows() == 0) throw std::invalid_argument("train on empty dataset");
  if (class_count < 1) throw std::invalid_argument("class count must be >= 1");
  if (!mem.has_quantizer()) throw std::logic_error("item memory has no fitted quantizer");
  HdModel model;
  model.memory_ = std::move(mem);
  model.class_counts_.assign(static_cast<std::size_t>(class_count), 0);
  model.accumulators_.assign(static_cast<std::size_t>(class_count),
                             std::vector<std::uint32_t>(model.memory_.dim(), 0));
  model.update(features, labels);
  return model;
}

void HdModel::check_labels(const Matrix& features, std::span<const int> labels) const {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("feature rows and label count differ");
  }
  if (features.rows() > 0 && features.cols() != memory_.feature_count()) {
    throw std::invalid_argument("feature count differs from item memory");
  }
  for (const int label : labels) {
    if (label < 1 || label > class_count()) {
      throw std::invalid_argument("label " + std::to_string(label) + " outside [1, " +
                                  std::to_string(class_count()) + "]");
    }
  }
}

void HdModel::add_sample(std::span<const double> x, int label) {
  const Hypervector enc = memory_.encode_real(x);
  auto& acc = accumulators_[static_cast<std::size_t>(label - 1)];
  for (std::size_t j = 0; j < enc.dim(); ++j) acc[j] += enc.bit(j);
  ++class_counts_[static_cast<std::size_t>(label - 1)];
}

void HdModel::update(const Matrix& features, std::span<const int> labels) {
  check_labels(features, labels);
  for (std::size_t r = 0; r < features.rows(); ++r) add_sample(features.row(r), labels[r]);
  binarize();
}

void HdModel::binarize() {
  centroids_.assign(class_counts_.size(), Hypervector());
  for (std::size_t k = 0; k < class_counts_.size(); ++k) {
    Hypervector hv(memory_.dim());
    const std::uint64_t threshold = class_counts_[k] / 2;  // bit = count > threshold
    const auto& acc = accumulators_[k];
    if (class_counts_[k] > 0) {
      for (std::size_t j = 0; j < hv.dim(); ++j) {
        if (acc[j] > threshold) hv.set_bit(j, true);
      }
    }
    centroids_[k] = std::move(hv);
  }
}

int HdModel::predict_encoded(const Hypervector& hv) const {
  int best = 0;
  std::size_t best_bits = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < centroids_.size(); ++k) {
    if (class_counts_[k] == 0) continue;  // empty classes never win
    const std::size_t bits = hamming_bits(hv, centroids_[k]);
    if (bits < best_bits) {
      best_bits = bits;
      best = static_cast<int>(k) + 1;
    }
  }
  if (best == 0) throw std::logic_error("predict with no trained class");
  return best;
}

int HdModel::predict(std::span<const double> x) const {
  return predict_encoded(memory_.encode_real(x));
}

std::vector<int> HdModel::predict_batch(const Matrix& features) const {
  std::vector<int> out(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) out[r] = predict(features.row(r));
  return out;
}

double HdModel::evaluate(const Matrix& features, std::span<const int> labels) const {
  if (features.rows() == 0) throw std::invalid_argument("evaluate on empty dataset");
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("feature rows and label count differ");
  }
  std::size_t correct = 0;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    correct += predict(features.row(r)) == labels[r];
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows());
}

HdModel HdModelAccess::assemble(ItemMemory mem, std::vector<std::uint64_t> counts,
                                std::vector<std::vector<std::uint32_t>> accumulators) {
  HdModel model;
  model.memory_ = std::move(mem);
  model.class_counts_ = std::move(counts);
  model.accumulators_ = std::move(accumulators);
  model.binarize();
  return model;
}

}  // namespace syhd
