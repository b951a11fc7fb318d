#pragma once

#include <random>
#include <vector>

#include <hifir/hifir.hpp>

#include "oracle.hpp"

namespace testing_helpers {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// random n x n sparse matrix with a nonzero diagonal and about `per_row`
/// off-diagonal entries per row
inline hifir::SparseMatrix random_sparse(std::size_t n, std::size_t per_row, std::mt19937_64 &rng,
                                         double diag_shift = 0.0) {
  std::normal_distribution<double>           g;
  std::uniform_int_distribution<std::size_t> col(0, n - 1);
  std::vector<hifir::Triplet>                t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, g(rng) + diag_shift});
    for (std::size_t k = 0; k < per_row; ++k) t.push_back({i, col(rng), g(rng)});
  }
  return hifir::SparseMatrix::from_triplets(n, n, std::move(t));
}

/// dense matrix of an operator
inline oracle::Mat operator_matrix(const hifir::LinearOperator &op) {
  return oracle::assemble(op.size(), [&](std::span<const double> x, std::span<double> y) {
    op.apply(x, y);
  });
}

inline oracle::Mat operator_matrix_t(const hifir::LinearOperator &op) {
  return oracle::assemble(op.size(), [&](std::span<const double> x, std::span<double> y) {
    op.apply_transpose(x, y);
  });
}

inline double rel_diff(std::span<const double> x, std::span<const double> y) {
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double ny = oracle::norm2(y);
  return ny > 0.0 ? oracle::norm2(d) / ny : oracle::norm2(d);
}

}  // namespace testing_helpers
