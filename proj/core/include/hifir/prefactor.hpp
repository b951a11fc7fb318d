/// \file hifir/prefactor.hpp
/// \brief Per-level preprocessing: scaling, matching, ordering, static deferring

#pragma once

#include <limits>

#include "hifir/sparse.hpp"

namespace hifir {

/// \brief diagonal scalings W (rows) and V (columns); W A V is balanced
struct Scaling {
  DenseVector row_scale;
  DenseVector col_scale;

  static Scaling identity(std::size_t n);
};

/// \brief split of a level into indices kept for elimination and deferred ones
struct LevelPartition {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> deferred;
};

/// \brief Ruiz equilibration in the max norm
///
/// Alternately divides rows and columns by the square root of their largest
/// entry. Stops once every nonempty scaled row and column has its maximum
/// within tol of one, or after max_sweeps. Empty rows and columns keep scale 1.
Scaling equilibrate(const SparseMatrix &A, int max_sweeps = 10, double tol = 1e-2);

/// \brief W A V
SparseMatrix apply_scaling(const SparseMatrix &A, const Scaling &s);

/// \brief maximum-cardinality matching onto the diagonal
///
/// Greedy initialization in descending |a_ij| order, completed by BFS
/// augmenting paths. Returns the column permutation q with column q[i]
/// placed on diagonal position i. Unmatched rows take column i when it is
/// free, otherwise the leftover columns in increasing order.
PermVec match_diagonal(const SparseMatrix &A_scaled);

/// \brief reverse Cuthill-McKee ordering of a symmetric pattern
///
/// Each component starts from its minimum-degree node (lowest index on
/// ties); neighbours are queued by increasing degree, then index. Returns
/// perm with perm[k] the node placed at position k.
PermVec reorder_fill(const SparseMatrix &pattern);

/// \brief |A| + |A|^T as a pattern with unit values
SparseMatrix symmetrized_pattern(const SparseMatrix &A);

struct DeferParams {
  double ratio_bound = 1000.0;
  double zero_tol    = 10.0 * std::numeric_limits<double>::epsilon();
};

/// \brief choose indices that must not be eliminated on this level
///
/// Index i pairs row i with column perm[i]. It is deferred if the scaled
/// diagonal is tiny relative to the scaled row, if the row or column scale
/// is far from the inverse of that row's or column's largest entry, or if
/// the diagonal is structurally missing.
LevelPartition static_defer(const SparseMatrix &A, const Scaling &s, const PermVec &perm,
                            const DeferParams &params = {});

}  // namespace hifir
