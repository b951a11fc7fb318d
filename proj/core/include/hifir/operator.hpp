/// \file hifir/operator.hpp
/// \brief Abstract square linear operators used by the Krylov solvers

#pragma once

#include <algorithm>
#include <span>

#include "hifir/sparse.hpp"

namespace hifir {

/// \class LinearOperator
/// \brief y = op(x) and y = op^T(x) on vectors of length size()
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t size() const = 0;
  virtual void        apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void        apply_transpose(std::span<const double> x, std::span<double> y) const = 0;

  DenseVector operator()(std::span<const double> x) const {
    DenseVector y(size());
    apply(x, y);
    return y;
  }
};

/// \brief sparse matrix as an operator; the matrix must outlive the view
class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(const SparseMatrix &A) : A_(&A) {
    if (A.rows() != A.cols()) throw DimensionError("MatrixOperator: matrix must be square");
  }
  std::size_t size() const override { return A_->rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override { spmv(*A_, x, y); }
  void apply_transpose(std::span<const double> x, std::span<double> y) const override {
    spmv_t(*A_, x, y);
  }
  const SparseMatrix &matrix() const noexcept { return *A_; }

 private:
  const SparseMatrix *A_;
};

/// \brief op^T as an operator
class TransposedOperator final : public LinearOperator {
 public:
  explicit TransposedOperator(const LinearOperator &op) : op_(&op) {}
  std::size_t size() const override { return op_->size(); }
  void apply(std::span<const double> x, std::span<double> y) const override {
    op_->apply_transpose(x, y);
  }
  void apply_transpose(std::span<const double> x, std::span<double> y) const override {
    op_->apply(x, y);
  }

 private:
  const LinearOperator *op_;
};

/// \brief identity operator, i.e. no preconditioning
class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(std::size_t n) : n_(n) {}
  std::size_t size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override {
    if (x.size() != n_ || y.size() != n_) throw DimensionError("IdentityOperator: length");
    std::copy(x.begin(), x.end(), y.begin());
  }
  void apply_transpose(std::span<const double> x, std::span<double> y) const override {
    apply(x, y);
  }

 private:
  std::size_t n_;
};

}  // namespace hifir
