/// \file hifir/ksp.hpp
/// \brief Right-preconditioned restarted GMRES and flexible GMRES

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "hifir/dense.hpp"
#include "hifir/hif.hpp"
#include "hifir/operator.hpp"

namespace hifir {

enum class Ortho { mgs, householder };
enum class KspMode { standard, nullspace, mpbw };
enum class KspExit { tol, restart_limit, mpbw, nullspace_stagnation, breakdown };

std::string to_string(KspExit e);

struct HistoryEntry {
  std::size_t iter    = 0;
  std::size_t matvecs = 0;
  double      rel_res = 0.0;  ///< Arnoldi residual estimate
  double      kappa_H = 1.0;  ///< incremental estimate of cond(H_k)
};

/// \brief Arnoldi data of the last restart cycle
struct KrylovState {
  DenseMatrix Q;  ///< n x (k+1) orthonormal basis
  DenseMatrix H;  ///< (k+1) x k Hessenberg matrix before the Givens sweep
  DenseMatrix Z;  ///< n x k preconditioned directions
  DenseVector givens_c, givens_s;
  DenseVector res_history;
};

struct SolveReport {
  DenseVector               x;
  std::size_t               iters    = 0;
  std::size_t               matvecs  = 0;
  std::size_t               restarts = 0;
  double                    rel_res  = 0.0;  ///< ||b - A x|| / ||b|| recomputed at exit
  KspExit                   exit     = KspExit::restart_limit;
  std::vector<HistoryEntry> history;
  std::optional<KrylovState> state;  ///< filled when KspOptions::keep_state
  bool                      fallback = false;  ///< set by callers that retried

  bool converged() const noexcept { return exit == KspExit::tol; }
};

/// \brief one JSON object per line: iter, matvecs, rel_res, kappa_H
std::string history_json_lines(const SolveReport &r);

/// \brief z = M_k(q); returns the number of products with A it spent
using VariablePreconditioner =
    std::function<std::size_t(std::span<const double> q, std::span<double> z, std::size_t cycle)>;

VariablePreconditioner fixed_preconditioner(const LinearOperator &G);

/// \brief HIFIR as a variable preconditioner; maxiter = base.maxiter * 2^cycle,
///        capped at max_iter_cap
VariablePreconditioner hifir_preconditioner(const LinearOperator &G, const LinearOperator &A,
                                            RefineParams base = {},
                                            std::size_t  max_iter_cap = 1024);

struct NullspaceStopParams {
  bool        schur_flag  = false;
  double      a_norm1     = 0.0;  ///< ||A||_1 of the operator being solved with
  double      target      = std::numeric_limits<double>::epsilon();
  double      small       = 1e-11;
  double      kappa_guard = 1e6;
  std::size_t max_stalls  = 2;
};

enum class NullDecision { skipped, proceed, converged, stagnated };

/// \class NullspaceMonitor
/// \brief explicit ||A x_k||_1 checks for FGMRES in null-space mode
class NullspaceMonitor {
 public:
  explicit NullspaceMonitor(NullspaceStopParams p) : p_(p) {}

  /// \brief whether the explicit residual is worth computing at this step
  bool guard(double kappa_H) const noexcept {
    return p_.schur_flag || kappa_H > p_.kappa_guard;
  }
  /// \brief feed ||A x||_1 / (||A||_1 ||x||_1); remembers the best value
  NullDecision observe(double rel);

  bool        improved() const noexcept { return improved_; }
  double      best() const noexcept { return best_; }
  std::size_t checks() const noexcept { return checks_; }
  const NullspaceStopParams &params() const noexcept { return p_; }

 private:
  NullspaceStopParams p_;
  double      best_     = std::numeric_limits<double>::infinity();
  std::size_t stalls_   = 0;
  std::size_t checks_   = 0;
  bool        improved_ = false;
};

/// \brief guarded stopping decision; explicit_residual runs only past the guard
NullDecision nullspace_stop(NullspaceMonitor &mon, double kappa_H,
                            const std::function<double()> &explicit_residual);

struct MpbwParams {
  double      kappa_threshold = 1.0 / std::sqrt(std::numeric_limits<double>::epsilon());
  std::size_t window          = 5;
  double      min_improvement = 0.01;
};

/// \brief stop once cond(H_k) reached kappa_threshold and the residual
///        improved by less than min_improvement over the last window steps
bool mpbw_check(double kappa_H, std::span<const double> rel_history, const MpbwParams &p = {});

struct KspOptions {
  std::size_t         restart = 30;
  double              rtol    = 1e-12;
  std::size_t         maxit   = 500;  ///< total Arnoldi steps over all cycles
  Ortho               ortho   = Ortho::mgs;
  KspMode             mode    = KspMode::standard;
  DenseVector         x0;  ///< empty means zero
  NullspaceStopParams null{};
  MpbwParams          mpbw{};
  bool                keep_state = false;
  /// called after each explicit null-space residual evaluation
  std::function<void(double rel)> on_null_check;
};

/// \brief flexible GMRES, x = x0 + Z_k y_k
SolveReport fgmres(const LinearOperator &A, const VariablePreconditioner &M,
                   std::span<const double> b, const KspOptions &opts = {});

/// \brief right-preconditioned GMRES(m) with a fixed operator G
SolveReport gmres(const LinearOperator &A, const LinearOperator &G, std::span<const double> b,
                  const KspOptions &opts = {});
SolveReport gmres(const SparseMatrix &A, const LinearOperator &G, std::span<const double> b,
                  std::size_t restart, double rtol, std::size_t maxit);

}  // namespace hifir
