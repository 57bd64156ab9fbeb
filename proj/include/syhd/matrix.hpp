#pragma once

// Dense row-major matrix of doubles, sized for MLP training on desk-scale
// datasets. Only the products backprop needs are provided.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace syhd {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// out = a · bᵀ, a: m×k, b: n×k → m×n. The transposed-B form keeps both
// operands row-contiguous in the inner loop.
Matrix matmul_abt(const Matrix& a, const Matrix& b);

// out = a · b, a: m×k, b: k×n → m×n.
Matrix matmul_ab(const Matrix& a, const Matrix& b);

// out = aᵀ · b, a: k×m, b: k×n → m×n.
Matrix matmul_atb(const Matrix& a, const Matrix& b);

}  // namespace syhd
