/// \file hifir/mlilu.hpp
/// \brief Crout incomplete LDU with deferring, and the multilevel hierarchy
///
/// One level factors
///
///   P^T W A V Q = [B F; E C] ~ [L_B 0; L_E I] [D 0; 0 S] [U_B U_F; 0 I]
///
/// and recurses on the Schur complement S = C - L_E D U_F.

#pragma once

#include <limits>

#include "hifir/prefactor.hpp"
#include "hifir/sparse.hpp"

namespace hifir {

struct IluParams {
  double      alpha    = 10.0;  ///< fill ratio, infinity disables the cap
  double      droptol  = 1e-4;  ///< inverse-based drop tolerance
  double      tau      = 5.0;   ///< bound on the factor condition estimates
  std::size_t min_schur = 0;    ///< 0 selects max(100, sqrt(n))
  double      defer_switch_frac = 0.9;
  bool        drop_schur        = true;  ///< apply droptol to Schur entries
  DeferParams defer{};
  int         equil_sweeps = 10;
  double      equil_tol    = 1e-2;

  /// \brief exact factorization settings: nothing is dropped
  static IluParams no_drop() {
    IluParams p;
    p.alpha      = std::numeric_limits<double>::infinity();
    p.droptol    = 0.0;
    p.drop_schur = false;
    return p;
  }

  void validate() const;
};

/// \brief factors of one level in its permuted, scaled coordinates
struct LevelFactor {
  SparseMatrix L_B;  ///< strictly lower part, unit diagonal implied
  DenseVector  D_B;
  SparseMatrix U_B;  ///< strictly upper part, unit diagonal implied
  SparseMatrix L_E;  ///< n_schur x n_kept
  SparseMatrix U_F;  ///< n_kept x n_schur
  PermVec      perm_row;  ///< position -> row of the level input
  PermVec      perm_col;  ///< position -> column of the level input
  Scaling      scaling;   ///< applied to the level input
  std::size_t  n_kept = 0;
  std::size_t  n_static_deferred  = 0;
  std::size_t  n_dynamic_deferred = 0;

  std::size_t size() const noexcept { return perm_row.size(); }
  std::size_t n_schur() const noexcept { return size() - n_kept; }
  std::size_t nnz() const noexcept {
    return L_B.nnz() + U_B.nnz() + L_E.nnz() + U_F.nnz() + D_B.size();
  }
};

/// \brief result of eliminating the candidates of one prepared level
struct LevelResult {
  SparseMatrix L_B, U_B, L_E, U_F;
  DenseVector  D_B;
  /// processing position -> index of the input; accepted pivots first in
  /// elimination order, then the deferred indices in increasing order
  std::vector<std::size_t> order;
  std::size_t              n_kept = 0;
  SparseMatrix             schur;
};

/// \brief Crout incomplete LDU of M's leading n_candidates indices
///
/// M must already be scaled and permuted.
///
/// Indices at or beyond n_candidates are deferred up front. A candidate is
/// deferred dynamically when its pivot is zero, when accepting it would push
/// the running inverse-norm estimate of L_B or U_B beyond tau, or when it
/// would spread the pivot magnitudes (anchored at one) by more than tau.
LevelResult crout_ldu(const SparseMatrix &M, std::size_t n_candidates,
                      const IluParams &params);

/// \brief one level: prefactor, then crout_ldu on the prepared matrix
struct LevelOutput {
  LevelFactor  factor;
  SparseMatrix schur;
  /// static deferring covered the level or nothing could be eliminated;
  /// the level input should go to QRCP as it is
  bool qr_switch = false;
};

LevelOutput factor_level(const SparseMatrix &A_k, const IluParams &params);

/// \brief all levels plus the final Schur complement
struct Hierarchy {
  std::vector<LevelFactor> levels;
  SparseMatrix             final_schur;
  /// magnitude of the terms the final Schur complement was formed from:
  /// the larger of max|scaled input| and max|L_E| max|D_B| max|U_F|
  double schur_scale = 0.0;
};

Hierarchy build_hierarchy(const SparseMatrix &A, const IluParams &params);

}  // namespace hifir
