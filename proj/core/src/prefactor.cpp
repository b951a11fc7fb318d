#include "hifir/prefactor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace hifir {

Scaling Scaling::identity(std::size_t n) {
  return {DenseVector(n, 1.0), DenseVector(n, 1.0)};
}

Scaling equilibrate(const SparseMatrix &A, int max_sweeps, double tol) {
  if (A.rows() != A.cols()) throw DimensionError("equilibrate: matrix must be square");
  const std::size_t n = A.rows();
  Scaling           s = Scaling::identity(n);
  DenseVector       rmax(n), cmax(n);
  const auto        off = A.row_offsets();
  const auto        col = A.col_indices();
  const auto        val = A.values();

  auto measure = [&] {
    std::fill(rmax.begin(), rmax.end(), 0.0);
    std::fill(cmax.begin(), cmax.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
        const double a = std::abs(val[p]) * s.row_scale[i] * s.col_scale[col[p]];
        rmax[i]        = std::max(rmax[i], a);
        cmax[col[p]]   = std::max(cmax[col[p]], a);
      }
  };
  auto converged = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      if (rmax[i] != 0.0 && std::abs(1.0 - rmax[i]) > tol) return false;
      if (cmax[i] != 0.0 && std::abs(1.0 - cmax[i]) > tol) return false;
    }
    return true;
  };

  measure();
  for (int sweep = 0; sweep < max_sweeps && !converged(); ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rmax[i] != 0.0) s.row_scale[i] /= std::sqrt(rmax[i]);
      if (cmax[i] != 0.0) s.col_scale[i] /= std::sqrt(cmax[i]);
    }
    measure();
  }
  return s;
}

SparseMatrix apply_scaling(const SparseMatrix &A, const Scaling &s) {
  if (s.row_scale.size() != A.rows() || s.col_scale.size() != A.cols())
    throw DimensionError("apply_scaling: scaling does not match matrix");
  std::vector<double> vals(A.values().begin(), A.values().end());
  const auto          off = A.row_offsets();
  const auto          col = A.col_indices();
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p)
      vals[p] *= s.row_scale[i] * s.col_scale[col[p]];
  return SparseMatrix(A.rows(), A.cols(), {off.begin(), off.end()}, {col.begin(), col.end()},
                      std::move(vals));
}

PermVec match_diagonal(const SparseMatrix &A) {
  if (A.rows() != A.cols()) throw DimensionError("match_diagonal: matrix must be square");
  constexpr auto    none = static_cast<std::size_t>(-1);
  const std::size_t n    = A.rows();
  const auto        off  = A.row_offsets();
  const auto        col  = A.col_indices();
  const auto        val  = A.values();

  std::vector<std::size_t> row_of(n, none), col_of(n, none);

  // greedy pass over entries by decreasing magnitude
  std::vector<std::size_t> order;
  order.reserve(A.nnz());
  for (std::size_t p = 0; p < A.nnz(); ++p)
    if (val[p] != 0.0) order.push_back(p);
  std::vector<std::size_t> row_at(A.nnz());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) row_at[p] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(val[a]) > std::abs(val[b]);
  });
  for (auto p : order) {
    const auto i = row_at[p], j = col[p];
    if (col_of[i] == none && row_of[j] == none) {
      col_of[i] = j;
      row_of[j] = i;
    }
  }

  // augmenting paths from each free row, breadth first
  std::vector<std::size_t> parent_row(n), visit_mark(n, none);
  std::deque<std::size_t>  queue;
  for (std::size_t root = 0; root < n; ++root) {
    if (col_of[root] != none) continue;
    queue.clear();
    queue.push_back(root);
    std::size_t end_col = none;
    while (!queue.empty() && end_col == none) {
      const auto i = queue.front();
      queue.pop_front();
      for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
        const auto j = col[p];
        if (val[p] == 0.0 || visit_mark[j] == root) continue;
        visit_mark[j] = root;
        parent_row[j] = i;
        if (row_of[j] == none) {
          end_col = j;
          break;
        }
        queue.push_back(row_of[j]);
      }
    }
    // flip the path back to the root
    for (auto j = end_col; j != none;) {
      const auto i    = parent_row[j];
      const auto prev = col_of[i];
      col_of[i]       = j;
      row_of[j]       = i;
      j               = prev;
    }
  }

  // unmatched rows: identity if possible, else leftover columns in order
  std::vector<std::size_t> leftovers;
  for (std::size_t i = 0; i < n; ++i)
    if (col_of[i] == none && row_of[i] == none) {
      col_of[i] = i;
      row_of[i] = i;
    }
  for (std::size_t j = 0; j < n; ++j)
    if (row_of[j] == none) leftovers.push_back(j);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (col_of[i] == none) col_of[i] = leftovers[next++];
  return PermVec(std::move(col_of));
}

SparseMatrix symmetrized_pattern(const SparseMatrix &A) {
  std::vector<Triplet> trips;
  trips.reserve(2 * A.nnz());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (auto j : A.row_indices(i)) {
      trips.push_back({i, j, 1.0});
      trips.push_back({j, i, 1.0});
    }
  auto S = SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(trips));
  // entries were summed; rebuild with unit values
  return SparseMatrix(S.rows(), S.cols(), {S.row_offsets().begin(), S.row_offsets().end()},
                      {S.col_indices().begin(), S.col_indices().end()},
                      std::vector<double>(S.nnz(), 1.0));
}

PermVec reorder_fill(const SparseMatrix &G) {
  if (G.rows() != G.cols()) throw DimensionError("reorder_fill: pattern must be square");
  const std::size_t        n = G.rows();
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : G.row_indices(i))
      if (j != i) ++degree[i];

  std::vector<std::size_t> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), std::size_t{0});
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });

  std::vector<char>        placed(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> nbrs;
  for (auto start : by_degree) {
    if (placed[start]) continue;
    const std::size_t head = order.size();
    placed[start]          = 1;
    order.push_back(start);
    for (std::size_t k = head; k < order.size(); ++k) {
      const auto v = order[k];
      nbrs.clear();
      for (auto w : G.row_indices(v))
        if (!placed[w]) {
          placed[w] = 1;
          nbrs.push_back(w);
        }
      std::sort(nbrs.begin(), nbrs.end(), [&](std::size_t a, std::size_t b) {
        return degree[a] != degree[b] ? degree[a] < degree[b] : a < b;
      });
      order.insert(order.end(), nbrs.begin(), nbrs.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return PermVec(std::move(order));
}

LevelPartition static_defer(const SparseMatrix &A, const Scaling &s, const PermVec &perm,
                            const DeferParams &params) {
  const std::size_t n = A.rows();
  if (A.cols() != n || perm.size() != n || s.row_scale.size() != n || s.col_scale.size() != n)
    throw DimensionError("static_defer: inconsistent inputs");
  const auto off = A.row_offsets();
  const auto col = A.col_indices();
  const auto val = A.values();

  DenseVector rmax(n, 0.0), cmax(n, 0.0), srow(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      const double a = std::abs(val[p]);
      rmax[i]        = std::max(rmax[i], a);
      cmax[col[p]]   = std::max(cmax[col[p]], a);
      srow[i]        = std::max(srow[i], a * s.row_scale[i] * s.col_scale[col[p]]);
    }

  auto unstable = [&](double ratio) {
    return !(ratio >= 1.0 / params.ratio_bound && ratio <= params.ratio_bound);
  };

  LevelPartition part;
  for (std::size_t i = 0; i < n; ++i) {
    const auto   c    = perm[i];
    const double diag = std::abs(A.at(i, c)) * s.row_scale[i] * s.col_scale[c];
    const bool   defer = diag == 0.0 || diag <= params.zero_tol * srow[i] ||
                        unstable(s.row_scale[i] * rmax[i]) ||
                        unstable(s.col_scale[c] * cmax[c]);
    (defer ? part.deferred : part.kept).push_back(i);
  }
  return part;
}

}  // namespace hifir
