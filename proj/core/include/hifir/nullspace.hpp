/// \file hifir/nullspace.hpp
/// \brief Orthonormal null-space bases by HIFIR-preconditioned FGMRES

#pragma once

#include <cstdint>

#include "hifir/hif.hpp"
#include "hifir/ksp.hpp"

namespace hifir {

/// \class HouseholderBasis
/// \brief orthonormal columns V = P_0 ... P_{k-1} [I_k; 0] kept as reflectors
class HouseholderBasis {
 public:
  HouseholderBasis() = default;
  explicit HouseholderBasis(std::size_t n) : n_(n) {}

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return us_.size(); }

  /// \brief x <- (I - V V^T) x
  void project_out(std::span<double> x) const;

  /// \brief append the normalized component of x orthogonal to V
  ///
  /// Returns false, leaving the basis unchanged, when that component is zero.
  bool append(std::span<const double> x);

  /// \brief column j of V
  DenseVector column(std::size_t j) const;

  /// \brief x <- Q^T x and x <- Q x for the full orthogonal Q
  void apply_qt(std::span<double> x) const;
  void apply_q(std::span<double> x) const;

 private:
  std::size_t              n_ = 0;
  std::vector<DenseVector> us_;  ///< unit reflector vectors, u_k zero before k
};

/// \brief computed basis and its per-vector null-space residuals
struct NullSpaceBasis {
  DenseMatrix      V;  ///< n x k, orthonormal columns
  DenseVector      residuals_1norm;  ///< ||A v_i||_1 / (||A||_1 ||v_i||_1)
  HouseholderBasis qr_store;
  /// residual of the first rejected candidate, if one was tried
  double      rejected_residual = 0.0;
  std::size_t fgmres_iterations = 0;
  std::size_t matvecs           = 0;

  std::size_t size() const noexcept { return V.cols(); }
  DenseVector column(std::size_t j) const {
    return {V.col(j).begin(), V.col(j).end()};
  }
  /// \brief x <- x - V (V^T x)
  void project_out(std::span<double> x) const;
};

struct NullSpaceOptions {
  std::size_t   max_dim  = 16;
  double        tol_null = 1e-10;
  std::size_t   n_pre    = 4;  ///< refinement steps on each seed
  double        seed_beta_hi = 1e8;
  std::uint64_t seed     = 0;
  KspOptions    ksp      = default_ksp();
  RefineParams  hifir{};  ///< inner refinement inside FGMRES

  static KspOptions default_ksp() {
    KspOptions o;
    o.ortho = Ortho::householder;
    o.mode  = KspMode::nullspace;
    o.rtol  = 1e-14;
    return o;
  }
};

/// \brief b_i from the seed q_i
///
/// q_i itself when the final Schur complement is ill-conditioned; otherwise
/// n_pre steps of refinement with a large beta_hi, normalized.
DenseVector seed_rhs(const LinearOperator &G, const LinearOperator &A,
                     std::span<const double> q, bool schur_illcond,
                     const NullSpaceOptions &opts = {});

/// \brief generic driver on operators; a_norm1 is ||A||_1 of the operator
NullSpaceBasis compute_nullspace(const LinearOperator &A, double a_norm1,
                                 const LinearOperator &G, bool schur_illcond,
                                 const NullSpaceOptions &opts = {});

/// \brief right null space of A using the untruncated view of G
NullSpaceBasis compute_nullspace(const SparseMatrix &A, const HifFactorization &G,
                                 const NullSpaceOptions &opts = {});

/// \brief left null space: the same algorithm on A^T with G^T
NullSpaceBasis lns(const SparseMatrix &A, const HifFactorization &G,
                   const NullSpaceOptions &opts = {});

}  // namespace hifir
