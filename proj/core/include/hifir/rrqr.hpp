/// \file hifir/rrqr.hpp
/// \brief Householder QR with column pivoting for the final Schur complement

#pragma once

#include "hifir/dense.hpp"
#include "hifir/sparse.hpp"

namespace hifir {

enum class SchurMode { truncated, untruncated };

/// \struct QrcpFactors
/// \brief S P = Q R in LAPACK compact form
///
/// R sits in the upper triangle of qr; reflector k is (1, qr(k+1:n, k)) with
/// scalar tau[k], so H_k = I - tau_k v_k v_k^T and Q = H_0 H_1 ... H_{n-1}.
struct QrcpFactors {
  DenseMatrix qr;
  DenseVector tau;
  PermVec     perm;  ///< column j of S P is column perm[j] of S
  std::size_t rank_trunc = 0;
  std::size_t rank_full  = 0;

  std::size_t size() const noexcept { return perm.size(); }
  double      r(std::size_t i, std::size_t j) const noexcept { return qr(i, j); }

  DenseMatrix R() const;
  DenseMatrix Q() const;

  /// \brief x <- Q^T x and x <- Q x
  void apply_qt(std::span<double> x) const;
  void apply_q(std::span<double> x) const;

  /// \brief |r_11 / r_nn| exceeds kappa (true for an exactly singular R)
  bool ill_conditioned(double kappa = 1e10) const;
};

/// \brief Householder QRCP with norm downdating
///
/// Partial column norms are downdated and recomputed from scratch once they
/// fall below 1e-2 of the value at their last recomputation. rank_full counts
/// |r_ii| > eps |r_11| n, and rank_trunc is set with estimate_rank(1e10).
QrcpFactors qrcp(const DenseMatrix &S);

/// \brief largest k such that the incremental estimate of cond(R(0:k, 0:k))
///        stays within kappa_max
std::size_t estimate_rank(const QrcpFactors &f, double kappa_max);

/// \brief apply the generalized inverse of S built from the factors
///
/// truncated: P [R11^{-1} 0; 0 0] Q^T with the leading rank_trunc block.
/// untruncated: P R^{-1} Q^T with every diagonal below eps |r_11| replaced
/// by eps |r_11| (sign kept, + for an exact zero; eps when r_11 = 0).
DenseVector schur_solve(const QrcpFactors &f, std::span<const double> u, SchurMode mode);

/// \brief transpose of schur_solve
DenseVector schur_solve_t(const QrcpFactors &f, std::span<const double> u, SchurMode mode);

}  // namespace hifir
