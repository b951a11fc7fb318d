/// \file hifir/hif.hpp
/// \brief Hybrid incomplete factorization: multilevel ILU plus QRCP on the
///        final Schur complement, and the HIFIR refinement wrapper

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hifir/mlilu.hpp"
#include "hifir/operator.hpp"
#include "hifir/rrqr.hpp"

namespace hifir {

struct HifParams {
  IluParams ilu{};
  double    kappa_max = 1e10;  ///< rank-truncation bound on the Schur R factor
};

class HifOperator;

/// \brief unreadable, corrupt or unwritable factorization file
class FactorFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// \class HifFactorization
/// \brief immutable multilevel factorization; G is applied in either mode
class HifFactorization {
 public:
  HifFactorization() = default;

  static HifFactorization build(const SparseMatrix &A, const HifParams &params = {});

  std::size_t size() const noexcept { return n_; }
  std::size_t n_levels() const noexcept { return levels_.size(); }
  std::size_t schur_size() const noexcept { return schur_.size(); }
  std::size_t nnz() const noexcept;

  const std::vector<LevelFactor> &levels() const noexcept { return levels_; }
  const QrcpFactors              &schur() const noexcept { return schur_; }

  /// \brief mode used by hif_apply and hif_apply_t
  SchurMode mode() const noexcept { return mode_; }
  void      set_mode(SchurMode m) noexcept { mode_ = m; }

  /// \brief |r_11 / r_nn| of the untruncated Schur factor exceeds 1e10
  bool schur_ill_conditioned() const noexcept { return schur_illcond_; }

  void apply(std::span<const double> b, std::span<double> x, SchurMode mode) const;
  void apply_t(std::span<const double> b, std::span<double> x, SchurMode mode) const;

  /// \brief operator view bound to a fixed mode; *this must outlive it
  HifOperator view(SchurMode mode) const;

  void                    save(std::ostream &out) const;
  void                    save(const std::string &path) const;
  static HifFactorization load(std::istream &in);
  static HifFactorization load(const std::string &path);

 private:
  void apply_level(std::size_t lvl, std::span<double> b, std::span<double> x, SchurMode m,
                   bool trans) const;

  std::size_t              n_ = 0;
  std::vector<LevelFactor> levels_;
  QrcpFactors              schur_;
  SchurMode                mode_          = SchurMode::truncated;
  bool                     schur_illcond_ = false;
};

class HifOperator final : public LinearOperator {
 public:
  HifOperator(const HifFactorization &f, SchurMode mode) : f_(&f), mode_(mode) {}
  std::size_t size() const override { return f_->size(); }
  void        apply(std::span<const double> x, std::span<double> y) const override {
    f_->apply(x, y, mode_);
  }
  void apply_transpose(std::span<const double> x, std::span<double> y) const override {
    f_->apply_t(x, y, mode_);
  }
  const HifFactorization &factorization() const noexcept { return *f_; }
  SchurMode               mode() const noexcept { return mode_; }

 private:
  const HifFactorization *f_;
  SchurMode               mode_;
};

inline HifOperator HifFactorization::view(SchurMode mode) const { return {*this, mode}; }

DenseVector hif_apply(const HifFactorization &G, std::span<const double> b);
DenseVector hif_apply_t(const HifFactorization &G, std::span<const double> b);

struct RefineParams {
  double      beta_lo = 0.2;
  double      beta_hi = 100.0;
  std::size_t maxiter = 16;

  void validate() const;
};

enum class RefineExit { below_beta_lo, above_beta_hi, maxiter };

struct RefineResult {
  DenseVector x;
  std::size_t iterations = 0;  ///< each iteration costs one product with A
  double      ratio      = 1.0;  ///< ||r_j|| / ||r_0|| at exit
  RefineExit  exit       = RefineExit::maxiter;
};

/// \brief x_j = x_{j-1} + G (b - A x_{j-1}) from x_0 = 0
RefineResult hifir_refine(const LinearOperator &G, const LinearOperator &A,
                          std::span<const double> b, const RefineParams &p);
RefineResult hifir_refine(const HifFactorization &G, const SparseMatrix &A,
                          std::span<const double> b, const RefineParams &p);

}  // namespace hifir
