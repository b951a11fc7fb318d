#include "hifir/hif.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hifir {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

HifFactorization HifFactorization::build(const SparseMatrix &A, const HifParams &params) {
  if (A.rows() != A.cols()) throw DimensionError("HifFactorization: matrix must be square");
  if (!(params.kappa_max > 1.0)) throw std::invalid_argument("kappa_max must be > 1");
  HifFactorization f;
  f.n_    = A.rows();
  auto h  = build_hierarchy(A, params.ilu);
  f.levels_ = std::move(h.levels);
  f.schur_  = qrcp(to_dense(h.final_schur));
  // pivots at roundoff level relative to the level input are zero in exact
  // arithmetic; without this floor a Schur complement made only of
  // cancellation noise would look well conditioned
  const double floor =
      static_cast<double>(std::max<std::size_t>(A.rows(), 1)) * kEps * h.schur_scale;
  std::size_t above = 0;
  while (above < f.schur_.size() && std::abs(f.schur_.r(above, above)) > floor) ++above;
  f.schur_.rank_trunc =
      std::min({estimate_rank(f.schur_, params.kappa_max), f.schur_.rank_full, above});
  f.schur_illcond_ = f.schur_.ill_conditioned(1e10) || f.schur_.rank_trunc < f.schur_.size();
  return f;
}

std::size_t HifFactorization::nnz() const noexcept {
  std::size_t s = schur_.size() * schur_.size();
  for (const auto &l : levels_) s += l.nnz();
  return s;
}

void HifFactorization::apply_level(std::size_t lvl, std::span<double> b, std::span<double> x,
                                   SchurMode m, bool trans) const {
  if (lvl == levels_.size()) {
    if (b.empty()) return;
    const auto y = trans ? schur_solve_t(schur_, b, m) : schur_solve(schur_, b, m);
    std::copy(y.begin(), y.end(), x.begin());
    return;
  }
  const auto       &f  = levels_[lvl];
  const std::size_t n  = f.size(), nk = f.n_kept, ns = n - nk;
  const auto       &w  = f.scaling.row_scale;
  const auto       &v  = f.scaling.col_scale;
  const auto       &p  = f.perm_row;
  const auto       &q  = f.perm_col;

  DenseVector u(n), s2(ns);
  if (!trans) {
    for (std::size_t i = 0; i < n; ++i) u[i] = w[p[i]] * b[p[i]];
    // L_B t1 = u1, then t2 = u2 - L_E t1
    for (std::size_t i = 0; i < nk; ++i) {
      const auto idx = f.L_B.row_indices(i);
      const auto val = f.L_B.row_values(i);
      double     s   = u[i];
      for (std::size_t k = 0; k < idx.size(); ++k) s -= val[k] * u[idx[k]];
      u[i] = s;
    }
    for (std::size_t e = 0; e < ns; ++e) {
      const auto idx = f.L_E.row_indices(e);
      const auto val = f.L_E.row_values(e);
      double     s   = u[nk + e];
      for (std::size_t k = 0; k < idx.size(); ++k) s -= val[k] * u[idx[k]];
      u[nk + e] = s;
    }
    apply_level(lvl + 1, std::span<double>(u).subspan(nk), s2, m, false);
    // U_B y1 = D^{-1} t1 - U_F s2
    for (std::size_t i = nk; i-- > 0;) {
      double s = u[i] / f.D_B[i];
      {
        const auto idx = f.U_F.row_indices(i);
        const auto val = f.U_F.row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k) s -= val[k] * s2[idx[k]];
      }
      const auto idx = f.U_B.row_indices(i);
      const auto val = f.U_B.row_values(i);
      for (std::size_t k = 0; k < idx.size(); ++k) s -= val[k] * u[idx[k]];
      u[i] = s;
    }
    for (std::size_t e = 0; e < ns; ++e) u[nk + e] = s2[e];
    for (std::size_t j = 0; j < n; ++j) x[q[j]] = v[q[j]] * u[j];
    return;
  }

  for (std::size_t j = 0; j < n; ++j) u[j] = v[q[j]] * b[q[j]];
  // U_B^T t1 = u1 and t2 = u2 - U_F^T t1, column sweeps over the CSR rows
  for (std::size_t i = 0; i < nk; ++i) {
    const double ti = u[i];
    {
      const auto idx = f.U_B.row_indices(i);
      const auto val = f.U_B.row_values(i);
      for (std::size_t k = 0; k < idx.size(); ++k) u[idx[k]] -= val[k] * ti;
    }
    const auto idx = f.U_F.row_indices(i);
    const auto val = f.U_F.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) u[nk + idx[k]] -= val[k] * ti;
  }
  apply_level(lvl + 1, std::span<double>(u).subspan(nk), s2, m, true);
  for (std::size_t i = 0; i < nk; ++i) u[i] /= f.D_B[i];
  for (std::size_t e = 0; e < ns; ++e) {
    const auto idx = f.L_E.row_indices(e);
    const auto val = f.L_E.row_values(e);
    for (std::size_t k = 0; k < idx.size(); ++k) u[idx[k]] -= val[k] * s2[e];
  }
  // L_B^T y1 = rhs
  for (std::size_t i = nk; i-- > 0;) {
    const double yi  = u[i];
    const auto   idx = f.L_B.row_indices(i);
    const auto   val = f.L_B.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) u[idx[k]] -= val[k] * yi;
  }
  for (std::size_t e = 0; e < ns; ++e) u[nk + e] = s2[e];
  for (std::size_t i = 0; i < n; ++i) x[p[i]] = w[p[i]] * u[i];
}

void HifFactorization::apply(std::span<const double> b, std::span<double> x, SchurMode m) const {
  if (b.size() != n_ || x.size() != n_) throw DimensionError("hif_apply: length mismatch");
  DenseVector work(b.begin(), b.end());
  apply_level(0, work, x, m, false);
}

void HifFactorization::apply_t(std::span<const double> b, std::span<double> x,
                               SchurMode m) const {
  if (b.size() != n_ || x.size() != n_) throw DimensionError("hif_apply_t: length mismatch");
  DenseVector work(b.begin(), b.end());
  apply_level(0, work, x, m, true);
}

DenseVector hif_apply(const HifFactorization &G, std::span<const double> b) {
  DenseVector x(G.size());
  G.apply(b, x, G.mode());
  return x;
}

DenseVector hif_apply_t(const HifFactorization &G, std::span<const double> b) {
  DenseVector x(G.size());
  G.apply_t(b, x, G.mode());
  return x;
}

void RefineParams::validate() const {
  if (!(beta_lo > 0.0 && beta_lo < 1.0 && beta_hi > 1.0))
    throw std::invalid_argument("refinement requires 0 < beta_lo < 1 < beta_hi");
}

RefineResult hifir_refine(const LinearOperator &G, const LinearOperator &A,
                          std::span<const double> b, const RefineParams &p) {
  p.validate();
  const std::size_t n = A.size();
  if (b.size() != n || G.size() != n) throw DimensionError("hifir_refine: length mismatch");
  RefineResult res;
  res.x.assign(n, 0.0);
  DenseVector  r(b.begin(), b.end()), dx(n), ax(n);
  const double r0 = vec_norm2(b);
  if (r0 == 0.0) {
    res.ratio = 0.0;
    res.exit  = RefineExit::below_beta_lo;
    return res;
  }
  for (std::size_t j = 1; j <= p.maxiter; ++j) {
    G.apply(r, dx);
    for (std::size_t i = 0; i < n; ++i) res.x[i] += dx[i];
    A.apply(res.x, ax);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    res.iterations = j;
    res.ratio      = vec_norm2(r) / r0;
    if (res.ratio < p.beta_lo) {
      res.exit = RefineExit::below_beta_lo;
      return res;
    }
    if (!(res.ratio <= p.beta_hi)) {
      res.exit = RefineExit::above_beta_hi;
      return res;
    }
  }
  res.exit = RefineExit::maxiter;
  return res;
}

RefineResult hifir_refine(const HifFactorization &G, const SparseMatrix &A,
                          std::span<const double> b, const RefineParams &p) {
  const auto           gv = G.view(G.mode());
  const MatrixOperator av(A);
  return hifir_refine(gv, av, b, p);
}

}  // namespace hifir
