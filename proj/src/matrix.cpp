#include "syhd/matrix.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "syhd/parallel.hpp"

namespace syhd {

namespace {

[[noreturn]] void dim_error(const char* op, std::size_t a, std::size_t b) {
  throw std::invalid_argument(std::string(op) + ": inner dimensions disagree (" +
                              std::to_string(a) + " vs " + std::to_string(b) + ")");
}

// Below this many multiply-adds the thread spawn cost dominates the work.
constexpr std::size_t kParallelFlopThreshold = 1u << 18;

template <typename Fn>
void for_each_row(std::size_t rows, std::size_t flops, Fn&& fn) {
  if (flops < kParallelFlopThreshold) {
    for (std::size_t i = 0; i < rows; ++i) fn(i);
  } else {
    parallel_for(rows, fn);
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("matrix data size does not match rows*cols");
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols_) throw std::invalid_argument("ragged initializer rows");
    std::size_t c = 0;
    for (double v : row) m.at(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix matmul_abt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) dim_error("matmul_abt", a.cols(), b.cols());
  Matrix out(a.rows(), b.rows());
  for_each_row(a.rows(), a.rows() * a.cols() * b.rows(), [&](std::size_t i) {
    const auto ra = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto rb = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += ra[k] * rb[k];
      out.at(i, j) = acc;
    }
  });
  return out;
}

Matrix matmul_ab(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) dim_error("matmul_ab", a.cols(), b.rows());
  Matrix out(a.rows(), b.cols());
  for_each_row(a.rows(), a.rows() * a.cols() * b.cols(), [&](std::size_t i) {
    const auto ra = a.row(i);
    auto ro = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ra[k];
      if (aik == 0.0) continue;
      const auto rb = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ro[j] += aik * rb[j];
    }
  });
  return out;
}

Matrix matmul_atb(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) dim_error("matmul_atb", a.rows(), b.rows());
  Matrix out(a.cols(), b.cols());
  // Parallel over output rows: element (i, j) still accumulates in ascending k
  // order, so the result is bit-identical to the serial loop.
  for_each_row(a.cols(), a.rows() * a.cols() * b.cols(), [&](std::size_t i) {
    auto ro = out.row(i);
    for (std::size_t k = 0; k < a.rows(); ++k) {
      const double aki = a.row(k)[i];
      if (aki == 0.0) continue;
      const auto rb = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ro[j] += aki * rb[j];
    }
  });
  return out;
}

}  // namespace syhd
