#include "hifir/dense.hpp"

namespace hifir {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

DenseMatrix to_dense(const SparseMatrix &A) {
  DenseMatrix M(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto idx = A.row_indices(i);
    const auto val = A.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) M(i, idx[k]) = val[k];
  }
  return M;
}

}  // namespace hifir
