/// \file hifir/dense.hpp
/// \brief Small column-major dense matrix used by the final Schur stage

#pragma once

#include <span>
#include <vector>

#include "hifir/sparse.hpp"

namespace hifir {

/// \class DenseMatrix
/// \brief column-major dense storage with bounds-free element access
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double init = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double &operator()(std::size_t i, std::size_t j) noexcept { return data_[i + j * rows_]; }
  double  operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i + j * rows_];
  }

  std::span<double>       col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double>       data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t         rows_ = 0;
  std::size_t         cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix to_dense(const SparseMatrix &A);

}  // namespace hifir
