/// \file hifir/pipit.hpp
/// \brief Pseudoinverse solutions of singular systems with small null spaces
///
/// 1. factor A once and compute U spanning N(A^T) with the untruncated view;
/// 2. solve A x = b - U U^T b with the truncated view of the same factors;
/// 3. x_pi = x - V V^T x with V spanning N(A).

#pragma once

#include <optional>
#include <stdexcept>

#include "hifir/nullspace.hpp"

namespace hifir {

struct PipitOptions {
  HifParams        hif{};
  NullSpaceOptions null{};
  KspOptions       ksp = default_ksp();
  std::size_t      max_null_dim = 16;
  bool             allow_fallback = true;  ///< retry step 2 with FGMRES+HIFIR

  static KspOptions default_ksp() {
    KspOptions o;
    o.rtol = 1e-13;
    return o;
  }
};

struct PipitResult {
  DenseVector    x_pi;
  DenseVector    x_ls;
  NullSpaceBasis lns_basis;
  NullSpaceBasis rns_basis;
  SolveReport    ls_report;
  double         normal_res = 0.0;  ///< ||A^T r||_2 / ||A^T b||_2
  bool           rns_supplied = false;
};

class PipitError : public std::runtime_error {
 public:
  PipitError(const std::string &what, std::optional<SolveReport> partial = std::nullopt)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::optional<SolveReport> &partial() const noexcept { return partial_; }

 private:
  std::optional<SolveReport> partial_;
};

PipitResult pipit_solve(const SparseMatrix &A, std::span<const double> b,
                        const NullSpaceBasis *known_rns = nullptr, const PipitOptions &opts = {});

/// \brief same pipeline on an existing factorization of A
PipitResult pipit_solve(const SparseMatrix &A, const HifFactorization &G,
                        std::span<const double> b, const NullSpaceBasis *known_rns,
                        const PipitOptions &opts = {});

/// \brief basis of a single known vector, e.g. the constant mode
NullSpaceBasis basis_from_vectors(const std::vector<DenseVector> &vs);

}  // namespace hifir
