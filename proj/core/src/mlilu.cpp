#include "hifir/mlilu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hifir {

namespace {

using Entry = std::pair<std::size_t, double>;  // (index, value)

constexpr auto kNone = static_cast<std::size_t>(-1);

std::size_t fill_cap(double alpha, std::size_t input_nnz) {
  if (std::isinf(alpha)) return kNone;
  return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(std::max<std::size_t>(input_nnz, 1))));
}

/// keep the `cap` largest magnitudes, ties broken by index, order preserved
void keep_largest(std::vector<Entry> &v, std::size_t cap) {
  if (v.size() <= cap) return;
  std::vector<Entry> sorted = v;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cap - 1), sorted.end(),
                   [](const Entry &a, const Entry &b) {
                     const double x = std::abs(a.second), y = std::abs(b.second);
                     return x != y ? x > y : a.first < b.first;
                   });
  const Entry cut = sorted[cap - 1];
  auto        above = [&](const Entry &e) {
    const double x = std::abs(e.second), y = std::abs(cut.second);
    return x != y ? x > y : e.first <= cut.first;
  };
  v.erase(std::remove_if(v.begin(), v.end(), [&](const Entry &e) { return !above(e); }), v.end());
}

/// sparse accumulator over [0, n)
struct Accumulator {
  std::vector<double>      val;
  std::vector<char>        used;
  std::vector<std::size_t> idx;

  explicit Accumulator(std::size_t n) : val(n, 0.0), used(n, 0) {}

  void add(std::size_t i, double v) {
    if (!used[i]) {
      used[i] = 1;
      val[i]  = 0.0;
      idx.push_back(i);
    }
    val[i] += v;
  }
  void clear() {
    for (auto i : idx) used[i] = 0;
    idx.clear();
  }
};

SparseMatrix csr_from_rows(std::size_t n_rows, std::size_t n_cols,
                           std::vector<std::vector<Entry>> &rows) {
  std::vector<std::size_t> off(n_rows + 1, 0), col;
  std::vector<double>      val;
  for (std::size_t i = 0; i < n_rows; ++i) {
    auto &r = rows[i];
    std::sort(r.begin(), r.end(), [](const Entry &a, const Entry &b) { return a.first < b.first; });
    for (const auto &[j, v] : r) {
      col.push_back(j);
      val.push_back(v);
    }
    off[i + 1] = col.size();
  }
  return SparseMatrix(n_rows, n_cols, std::move(off), std::move(col), std::move(val));
}

/// A(rows, cols) for index lists
SparseMatrix extract(const SparseMatrix &A, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols) {
  std::vector<std::size_t> cpos(A.cols(), kNone);
  for (std::size_t k = 0; k < cols.size(); ++k) cpos[cols[k]] = k;
  std::vector<Triplet> trips;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto idx = A.row_indices(rows[k]);
    const auto val = A.row_values(rows[k]);
    for (std::size_t t = 0; t < idx.size(); ++t)
      if (cpos[idx[t]] != kNone) trips.push_back({k, cpos[idx[t]], val[t]});
  }
  return SparseMatrix::from_triplets(rows.size(), cols.size(), std::move(trips));
}

}  // namespace

void IluParams::validate() const {
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  if (!(droptol >= 0.0 && droptol < 1.0)) throw std::invalid_argument("droptol must be in [0, 1)");
  if (!(tau > 1.0)) throw std::invalid_argument("tau must be > 1");
  if (!(defer_switch_frac > 0.0 && defer_switch_frac <= 1.0))
    throw std::invalid_argument("defer_switch_frac must be in (0, 1]");
}

LevelResult crout_ldu(const SparseMatrix &M, std::size_t n_candidates, const IluParams &params) {
  params.validate();
  const std::size_t n = M.rows();
  if (M.cols() != n) throw DimensionError("crout_ldu: matrix must be square");
  n_candidates = std::min(n_candidates, n);
  const SparseMatrix Mt      = M.transpose();
  const double       tau     = params.tau;
  const double       sigma   = params.droptol;
  const bool         tau_fin = std::isfinite(tau);

  std::vector<char>               pivoted(n, 0);
  std::vector<std::vector<Entry>> Lrows(n), Ucols(n);  // (step, value)
  std::vector<std::vector<Entry>> Lcols, Urows;        // per step: (index, value)
  std::vector<std::size_t>        accepted;            // step -> index
  DenseVector                     D;
  DenseVector                     sL(n, 0.0), sU(n, 0.0);
  double                          dmax = 0.0, dmin = std::numeric_limits<double>::infinity();

  Accumulator        w(n), v(n);
  std::vector<Entry> urow, lcol;

  for (std::size_t c = 0; c < n_candidates; ++c) {
    // row c of U (including the pivot) over the unpivoted columns
    w.clear();
    for (std::size_t p = M.row_offsets()[c]; p < M.row_offsets()[c + 1]; ++p)
      if (!pivoted[M.col_indices()[p]]) w.add(M.col_indices()[p], M.values()[p]);
    w.add(c, 0.0);
    for (const auto &[s, l] : Lrows[c]) {
      const double coef = l * D[s];
      for (const auto &[j, u] : Urows[s])
        if (!pivoted[j]) w.add(j, -coef * u);
    }
    const double d = w.val[c];

    const double xL = (sL[c] > 0.0 ? -1.0 : 1.0) - sL[c];
    const double xU = (sU[c] > 0.0 ? -1.0 : 1.0) - sU[c];
    const double kL = std::abs(xL), kU = std::abs(xU);

    bool defer = d == 0.0 || !std::isfinite(d);
    if (!defer && tau_fin) {
      const double ad = std::abs(d);
      defer = kL > tau || kU > tau || ad * tau < std::max(1.0, dmax) ||
              (!accepted.empty() && ad > tau * dmin);
    }
    if (defer) continue;

    // column c of L over the unpivoted rows
    v.clear();
    for (std::size_t p = Mt.row_offsets()[c]; p < Mt.row_offsets()[c + 1]; ++p) {
      const auto r = Mt.col_indices()[p];
      if (!pivoted[r] && r != c) v.add(r, Mt.values()[p]);
    }
    for (const auto &[s, u] : Ucols[c]) {
      const double coef = u * D[s];
      for (const auto &[r, l] : Lcols[s])
        if (!pivoted[r] && r != c) v.add(r, -coef * l);
    }

    const std::size_t step = accepted.size();
    accepted.push_back(c);
    pivoted[c] = 1;
    D.push_back(d);
    dmax = std::max(dmax, std::abs(d));
    dmin = std::min(dmin, std::abs(d));

    urow.clear();
    for (auto j : w.idx) {
      if (j == c) continue;
      const double u = w.val[j] / d;
      if (std::abs(u) * kU > sigma) urow.emplace_back(j, u);
    }
    keep_largest(urow, fill_cap(params.alpha, M.row_nnz(c)));
    lcol.clear();
    for (auto r : v.idx) {
      const double l = v.val[r] / d;
      if (std::abs(l) * kL > sigma) lcol.emplace_back(r, l);
    }
    keep_largest(lcol, fill_cap(params.alpha, Mt.row_nnz(c)));

    for (const auto &[j, u] : urow) {
      Ucols[j].emplace_back(step, u);
      sU[j] += u * xU;
    }
    for (const auto &[r, l] : lcol) {
      Lrows[r].emplace_back(step, l);
      sL[r] += l * xL;
    }
    Urows.push_back(urow);
    Lcols.push_back(lcol);
  }

  LevelResult res;
  res.n_kept = accepted.size();
  res.D_B    = std::move(D);
  res.order  = accepted;
  for (std::size_t i = 0; i < n; ++i)
    if (!pivoted[i]) res.order.push_back(i);
  const std::size_t nk = res.n_kept, ns = n - nk;
  std::vector<std::size_t> pos(n);
  for (std::size_t k = 0; k < n; ++k) pos[res.order[k]] = k;

  // retained-fill cap on L rows and U columns, then assemble blocks
  std::vector<std::vector<Entry>> lb(nk), le(ns), ub(nk), uf(nk);
  for (std::size_t i = 0; i < n; ++i) {
    keep_largest(Lrows[i], fill_cap(params.alpha, M.row_nnz(i)));
    keep_largest(Ucols[i], fill_cap(params.alpha, Mt.row_nnz(i)));
    const auto k = pos[i];
    for (const auto &[s, l] : Lrows[i]) (k < nk ? lb[k] : le[k - nk]).emplace_back(s, l);
    for (const auto &[s, u] : Ucols[i]) (k < nk ? ub[s] : uf[s]).emplace_back(k < nk ? k : k - nk, u);
  }
  res.L_B = csr_from_rows(nk, nk, lb);
  res.L_E = csr_from_rows(ns, nk, le);
  res.U_B = csr_from_rows(nk, nk, ub);
  res.U_F = csr_from_rows(nk, ns, uf);

  // S = C - L_E D U_F
  std::vector<std::vector<Entry>> srows(ns);
  Accumulator                     acc(ns);
  for (std::size_t t = 0; t < ns; ++t) {
    acc.clear();
    const auto e = res.order[nk + t];
    for (std::size_t p = M.row_offsets()[e]; p < M.row_offsets()[e + 1]; ++p) {
      const auto j = M.col_indices()[p];
      if (pos[j] >= nk) acc.add(pos[j] - nk, M.values()[p]);
    }
    const auto lidx = res.L_E.row_indices(t);
    const auto lval = res.L_E.row_values(t);
    for (std::size_t q = 0; q < lidx.size(); ++q) {
      const double coef = lval[q] * res.D_B[lidx[q]];
      const auto   uidx = res.U_F.row_indices(lidx[q]);
      const auto   uval = res.U_F.row_values(lidx[q]);
      for (std::size_t r = 0; r < uidx.size(); ++r) acc.add(uidx[r], -coef * uval[r]);
    }
    double rowmax = 0.0;
    for (auto j : acc.idx) rowmax = std::max(rowmax, std::abs(acc.val[j]));
    for (auto j : acc.idx) {
      const double s = acc.val[j];
      if (params.drop_schur && std::abs(s) <= sigma * rowmax) continue;
      srows[t].emplace_back(j, s);
    }
  }
  res.schur = csr_from_rows(ns, ns, srows);
  return res;
}

LevelOutput factor_level(const SparseMatrix &A, const IluParams &params) {
  params.validate();
  const std::size_t n = A.rows();
  if (A.cols() != n) throw DimensionError("factor_level: matrix must be square");

  LevelOutput out;
  const Scaling      s    = equilibrate(A, params.equil_sweeps, params.equil_tol);
  const SparseMatrix As   = apply_scaling(A, s);
  const PermVec      q0   = match_diagonal(As);
  const auto         part = static_defer(A, s, q0, params.defer);

  if (n == 0 || static_cast<double>(part.deferred.size()) >=
                    params.defer_switch_frac * static_cast<double>(n)) {
    out.qr_switch = true;
    out.schur     = A;
    return out;
  }

  // fill-reducing order of the kept block in matched coordinates
  std::vector<std::size_t> kept_cols(part.kept.size());
  for (std::size_t k = 0; k < part.kept.size(); ++k) kept_cols[k] = q0[part.kept[k]];
  const auto    kept_block = extract(As, part.kept, kept_cols);
  const PermVec rcm        = reorder_fill(symmetrized_pattern(kept_block));

  std::vector<std::size_t> order0;
  order0.reserve(n);
  for (std::size_t k = 0; k < rcm.size(); ++k) order0.push_back(part.kept[rcm[k]]);
  order0.insert(order0.end(), part.deferred.begin(), part.deferred.end());
  std::vector<std::size_t> col0(n);
  for (std::size_t k = 0; k < n; ++k) col0[k] = q0[order0[k]];

  const SparseMatrix M   = permute(As, PermVec(order0), PermVec(col0));
  LevelResult        res = crout_ldu(M, part.kept.size(), params);

  std::vector<std::size_t> prow(n), pcol(n);
  for (std::size_t k = 0; k < n; ++k) {
    prow[k] = order0[res.order[k]];
    pcol[k] = col0[res.order[k]];
  }
  auto &f              = out.factor;
  f.L_B                = std::move(res.L_B);
  f.U_B                = std::move(res.U_B);
  f.L_E                = std::move(res.L_E);
  f.U_F                = std::move(res.U_F);
  f.D_B                = std::move(res.D_B);
  f.perm_row           = PermVec(std::move(prow));
  f.perm_col           = PermVec(std::move(pcol));
  f.scaling            = s;
  f.n_kept             = res.n_kept;
  f.n_static_deferred  = part.deferred.size();
  f.n_dynamic_deferred = part.kept.size() - res.n_kept;
  out.schur            = std::move(res.schur);
  out.qr_switch        = res.n_kept == 0;
  return out;
}

Hierarchy build_hierarchy(const SparseMatrix &A, const IluParams &params) {
  params.validate();
  if (A.rows() != A.cols()) throw DimensionError("build_hierarchy: matrix must be square");
  const std::size_t min_schur =
      params.min_schur ? params.min_schur
                       : std::max<std::size_t>(100, static_cast<std::size_t>(std::ceil(
                                                        std::sqrt(static_cast<double>(A.rows())))));
  Hierarchy    h;
  SparseMatrix cur = A;
  while (cur.rows() > 0) {
    auto out = factor_level(cur, params);
    if (out.qr_switch) {
      h.schur_scale = vec_norm_inf(cur.values());
      break;
    }
    const auto  &lf     = out.factor;
    const double growth = vec_norm_inf(lf.L_E.values()) * vec_norm_inf(lf.D_B) *
                          vec_norm_inf(lf.U_F.values());
    h.schur_scale =
        std::max(vec_norm_inf(apply_scaling(cur, lf.scaling).values()), growth);
    h.levels.push_back(std::move(out.factor));
    cur = std::move(out.schur);
    if (cur.rows() <= min_schur) break;
  }
  h.final_schur = std::move(cur);
  return h;
}

}  // namespace hifir
