#pragma once

// One-pass nearest-centroid HD classifier. Per-class, per-position counts of
// 1-bits are kept as integer accumulators so the model can absorb new samples
// later without revisiting old ones; binarized centroids are derived from the
// counts for prediction.

#include <cstdint>
#include <span>
#include <vector>

#include "syhd/item_memory.hpp"
#include "syhd/matrix.hpp"

namespace syhd {

class HdModel {
 public:
  HdModel() = default;

  // Labels are dense in [1, class_count]. Every sample is quantized with the
  // memory's quantizer, encoded, and added to its class accumulator.
  static HdModel train(const Matrix& features, std::span<const int> labels, ItemMemory mem,
                       int class_count);

  // One-pass absorption of new samples; bit-identical to retraining on the
  // concatenated data.
  void update(const Matrix& features, std::span<const int> labels);

  int predict(std::span<const double> x) const;
  int predict_encoded(const Hypervector& hv) const;
  std::vector<int> predict_batch(const Matrix& features) const;
  double evaluate(const Matrix& features, std::span<const int> labels) const;

  // Recomputes centroids from the accumulators: bit j of class k is 1 iff
  // count > class_count_k / 2, ties to 0.
  void binarize();

  int class_count() const { return static_cast<int>(class_counts_.size()); }
  std::uint64_t class_samples(int label) const {
    return class_counts_[static_cast<std::size_t>(label - 1)];
  }
  const std::vector<std::uint64_t>& class_counts() const { return class_counts_; }
  const std::vector<std::vector<std::uint32_t>>& accumulators() const { return accumulators_; }
  const std::vector<Hypervector>& centroids() const { return centroids_; }
  const ItemMemory& item_memory() const { return memory_; }

  bool operator==(const HdModel&) const = default;

 private:
  void add_sample(std::span<const double> x, int label);
  void check_labels(const Matrix& features, std::span<const int> labels) const;

  ItemMemory memory_;
  std::vector<std::uint64_t> class_counts_;
  // accumulators_[k][j] = number of encoded class-k samples with bit j set.
  std::vector<std::vector<std::uint32_t>> accumulators_;
  std::vector<Hypervector> centroids_;

  friend struct HdModelAccess;
};

struct HdModelAccess {
  static HdModel assemble(ItemMemory mem, std::vector<std::uint64_t> counts,
                          std::vector<std::vector<std::uint32_t>> accumulators);
};

}  // namespace syhd
