/// \file hifir/sparse.hpp
/// \brief Compressed sparse row storage, permutations and basic kernels

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hifir {

using DenseVector = std::vector<double>;

/// \brief thrown on inconsistent operand dimensions
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// \brief (row, column, value) entry used to assemble a SparseMatrix
struct Triplet {
  std::size_t row;
  std::size_t col;
  double      value;
};

/// \class SparseMatrix
/// \brief immutable real matrix in compressed sparse row format
///
/// Column indices are strictly increasing within each row and every stored
/// value is finite. Explicit zeros are allowed; empty rows are allowed
/// (structurally singular input).
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// \brief take ownership of CSR arrays, validating the invariants
  SparseMatrix(std::size_t n_rows, std::size_t n_cols,
               std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  /// \brief assemble from unordered triplets, summing duplicates
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> triplets);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double>      values() const noexcept { return values_; }

  std::span<const std::size_t> row_indices(std::size_t i) const noexcept {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const noexcept {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::size_t row_nnz(std::size_t i) const noexcept {
    return row_offsets_[i + 1] - row_offsets_[i];
  }

  /// \brief entry lookup by binary search; zero if not stored
  double at(std::size_t i, std::size_t j) const;

  SparseMatrix transpose() const;

  friend bool operator==(const SparseMatrix &, const SparseMatrix &) = default;

 private:
  std::size_t              n_rows_ = 0;
  std::size_t              n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double>      values_;
};

/// \class PermVec
/// \brief bijection on [0, n), stored as its image
class PermVec {
 public:
  PermVec() = default;
  explicit PermVec(std::vector<std::size_t> image);

  static PermVec identity(std::size_t n);

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return image_[i]; }
  std::span<const std::size_t> image() const noexcept { return image_; }

  PermVec inverse() const;

  friend bool operator==(const PermVec &, const PermVec &) = default;

 private:
  std::vector<std::size_t> image_;
};

/// \brief y = A x
DenseVector spmv(const SparseMatrix &A, std::span<const double> x);
void        spmv(const SparseMatrix &A, std::span<const double> x, std::span<double> y);

/// \brief y = A^T x without forming A^T
DenseVector spmv_t(const SparseMatrix &A, std::span<const double> x);
void        spmv_t(const SparseMatrix &A, std::span<const double> x, std::span<double> y);

/// \brief induced 1-norm, i.e. the maximum absolute column sum
double norm1(const SparseMatrix &A);
/// \brief induced infinity-norm, i.e. the maximum absolute row sum
double norm_inf(const SparseMatrix &A);
double norm_fro(const SparseMatrix &A);

double vec_norm1(std::span<const double> x);
double vec_norm2(std::span<const double> x);
double vec_norm_inf(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// \brief B(i, j) = A(rows[i], cols[j]); both permutations must match A
SparseMatrix permute(const SparseMatrix &A, const PermVec &rows, const PermVec &cols);

/// \brief leading or trailing principal block [first, first + count)^2
SparseMatrix principal_block(const SparseMatrix &A, std::size_t first, std::size_t count);

}  // namespace hifir
