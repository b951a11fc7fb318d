#include "hifir/ksp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hifir/condest.hpp"

namespace hifir {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

/// Householder reflector P = I - 2 u u^T acting on [k, n), u unit
struct Reflector {
  DenseVector u;
  std::size_t k = 0;
  bool        identity = true;

  void apply(std::span<double> x) const {
    if (identity) return;
    const double s = 2.0 * dot(std::span<const double>(u).subspan(k),
                               std::span<const double>(x).subspan(k));
    for (std::size_t i = k; i < x.size(); ++i) x[i] -= s * u[i];
  }
};

/// reflector mapping x[k:] onto alpha e_k; returns alpha
double make_reflector(std::span<const double> x, std::size_t k, Reflector &P) {
  const std::size_t n = x.size();
  P.k                 = k;
  P.u.assign(n, 0.0);
  const double nrm = vec_norm2(x.subspan(k));
  if (nrm == 0.0) {
    P.identity = true;
    return 0.0;
  }
  const double alpha = x[k] > 0.0 ? -nrm : nrm;
  for (std::size_t i = k; i < n; ++i) P.u[i] = x[i];
  P.u[k] -= alpha;
  const double un = vec_norm2(P.u);
  for (auto &v : P.u) v /= un;
  P.identity = false;
  return alpha;
}

/// Givens rotation zeroing b in (a, b)
void givens(double a, double b, double &c, double &s, double &r) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
    r = a;
    return;
  }
  r = std::hypot(a, b);
  c = a / r;
  s = b / r;
}

/// one restart cycle of Arnoldi storage
struct Cycle {
  std::vector<DenseVector> Q, Z, R, Hraw;
  std::vector<Reflector>   P;
  DenseVector              g, cs, sn;

  /// solve R(0:k,0:k) y = g(0:k)
  DenseVector solve(std::size_t k) const {
    DenseVector y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= R[j][i] * y[j];
      y[i] = R[i][i] != 0.0 ? s / R[i][i] : 0.0;
    }
    return y;
  }

  /// y with R(0:k+1,0:k+1) y = 0, y_k = 1
  DenseVector null_vector(std::size_t k) const {
    DenseVector y(k + 1, 0.0);
    y[k] = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      double s = 0.0;
      for (std::size_t j = i + 1; j <= k; ++j) s -= R[j][i] * y[j];
      y[i] = R[i][i] != 0.0 ? s / R[i][i] : 0.0;
    }
    return y;
  }

  void combine(std::span<const double> y, std::span<double> x) const {
    for (std::size_t j = 0; j < y.size(); ++j) axpy(y[j], Z[j], x);
  }
};

double true_rel(const LinearOperator &A, std::span<const double> b, std::span<const double> x,
                double bnorm, std::size_t &matvecs) {
  DenseVector r(b.size());
  A.apply(x, r);
  ++matvecs;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return vec_norm2(r) / bnorm;
}

}  // namespace

std::string to_string(KspExit e) {
  switch (e) {
    case KspExit::tol: return "tol";
    case KspExit::restart_limit: return "restart_limit";
    case KspExit::mpbw: return "mpbw";
    case KspExit::nullspace_stagnation: return "nullspace_stagnation";
    case KspExit::breakdown: return "breakdown";
  }
  return "unknown";
}

std::string history_json_lines(const SolveReport &r) {
  std::string out;
  char        buf[160];
  for (const auto &h : r.history) {
    std::snprintf(buf, sizeof buf,
                  "{\"iter\":%zu,\"matvecs\":%zu,\"rel_res\":%.17g,\"kappa_H\":%.17g}\n", h.iter,
                  h.matvecs, h.rel_res, std::isfinite(h.kappa_H) ? h.kappa_H : 1e308);
    out += buf;
  }
  return out;
}

VariablePreconditioner fixed_preconditioner(const LinearOperator &G) {
  return [&G](std::span<const double> q, std::span<double> z, std::size_t) -> std::size_t {
    G.apply(q, z);
    return 0;
  };
}

VariablePreconditioner hifir_preconditioner(const LinearOperator &G, const LinearOperator &A,
                                            RefineParams base, std::size_t cap) {
  base.validate();
  return [&G, &A, base, cap](std::span<const double> q, std::span<double> z,
                             std::size_t cycle) -> std::size_t {
    RefineParams p = base;
    p.maxiter      = base.maxiter;
    for (std::size_t c = 0; c < cycle && p.maxiter < cap; ++c) p.maxiter *= 2;
    p.maxiter = std::min(p.maxiter, cap);
    auto res  = hifir_refine(G, A, q, p);
    std::copy(res.x.begin(), res.x.end(), z.begin());
    return res.iterations;
  };
}

NullDecision NullspaceMonitor::observe(double rel) {
  ++checks_;
  improved_ = rel < best_;
  if (improved_) best_ = rel;
  if (rel <= p_.target) return NullDecision::converged;
  if (improved_) {
    stalls_ = 0;
    return NullDecision::proceed;
  }
  if (best_ < p_.small && ++stalls_ >= p_.max_stalls) return NullDecision::stagnated;
  return NullDecision::proceed;
}

NullDecision nullspace_stop(NullspaceMonitor &mon, double kappa_H,
                            const std::function<double()> &explicit_residual) {
  if (!mon.guard(kappa_H)) return NullDecision::skipped;
  return mon.observe(explicit_residual());
}

bool mpbw_check(double kappa_H, std::span<const double> h, const MpbwParams &p) {
  if (!(kappa_H >= p.kappa_threshold)) return false;
  if (h.size() <= p.window) return false;
  const double before = h[h.size() - 1 - p.window], now = h.back();
  return before - now < p.min_improvement * before;
}

SolveReport fgmres(const LinearOperator &A, const VariablePreconditioner &M,
                   std::span<const double> b, const KspOptions &opts) {
  const std::size_t n = A.size();
  if (b.size() != n) throw DimensionError("fgmres: right-hand side length");
  if (!opts.x0.empty() && opts.x0.size() != n) throw DimensionError("fgmres: x0 length");
  if (opts.restart == 0) throw std::invalid_argument("fgmres: restart must be positive");
  const bool null_mode = opts.mode == KspMode::nullspace;
  const bool hh        = opts.ortho == Ortho::householder;
  if (null_mode && !(opts.null.a_norm1 > 0.0))
    throw std::invalid_argument("fgmres: null-space mode needs ||A||_1 > 0");

  SolveReport rep;
  rep.x = opts.x0.empty() ? DenseVector(n, 0.0) : opts.x0;
  const double bnorm = vec_norm2(b);
  if (bnorm == 0.0) {
    std::fill(rep.x.begin(), rep.x.end(), 0.0);
    rep.rel_res = 0.0;
    rep.exit    = KspExit::tol;
    return rep;
  }

  DenseVector r(b.begin(), b.end()), w(n), ax(n);
  if (!opts.x0.empty()) {
    A.apply(rep.x, ax);
    ++rep.matvecs;
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
  }
  double beta = vec_norm2(r);
  rep.history.push_back({0, rep.matvecs, beta / bnorm, 1.0});
  if (beta / bnorm <= opts.rtol) {
    rep.rel_res = beta / bnorm;
    rep.exit    = KspExit::tol;
    return rep;
  }

  NullspaceMonitor     monitor(opts.null);
  DenseVector          best_x;
  std::vector<double>  rel_hist;
  IncrementalCondition cond;
  const std::size_t    m = std::min(opts.restart, n);
  bool                 done = false;
  Cycle                cy;

  auto finish = [&](KspExit e) {
    rep.exit = e;
    done     = true;
  };

  for (std::size_t cycle = 0; !done; ++cycle) {
    rep.restarts = cycle;
    cy           = Cycle{};
    cy.g.assign(m + 1, 0.0);
    cy.cs.assign(m, 0.0);
    cy.sn.assign(m, 0.0);
    cond.reset();
    if (hh) {
      cy.P.emplace_back();
      cy.g[0] = make_reflector(r, 0, cy.P[0]);
      DenseVector q(n, 0.0);
      q[0] = 1.0;
      cy.P[0].apply(q);
      cy.Q.push_back(std::move(q));
    } else {
      cy.g[0] = beta;
      DenseVector q(r);
      for (auto &v : q) v /= beta;
      cy.Q.push_back(std::move(q));
    }

    std::size_t k           = 0;
    bool        cycle_break = false;  // leave the cycle and update x
    while (k < m && rep.iters < opts.maxit) {
      const std::size_t j = k;
      DenseVector       z(n);
      rep.matvecs += M(cy.Q[j], z, cycle);
      A.apply(z, w);
      ++rep.matvecs;
      const double wnorm = vec_norm2(w);

      DenseVector h(j + 2, 0.0);
      if (hh) {
        for (std::size_t i = 0; i <= j; ++i) cy.P[i].apply(w);
        if (j + 1 < n) {
          cy.P.emplace_back();
          h[j + 1] = make_reflector(w, j + 1, cy.P[j + 1]);
        }
        for (std::size_t i = 0; i <= j; ++i) h[i] = w[i];
      } else {
        for (std::size_t i = 0; i <= j; ++i) {
          h[i] = dot(cy.Q[i], w);
          axpy(-h[i], cy.Q[i], w);
        }
        h[j + 1] = vec_norm2(w);
      }
      const bool invariant = std::abs(h[j + 1]) <= kEps * wnorm || j + 1 >= n;
      if (!invariant) {
        DenseVector q(n, 0.0);
        if (hh) {
          q[j + 1] = 1.0;
          for (std::size_t i = j + 2; i-- > 0;) cy.P[i].apply(q);
        } else {
          for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / h[j + 1];
        }
        cy.Q.push_back(std::move(q));
      }
      cy.Z.push_back(std::move(z));
      if (opts.keep_state) cy.Hraw.push_back(h);

      // QR update of H
      for (std::size_t i = 0; i < j; ++i) {
        const double t = cy.cs[i] * h[i] + cy.sn[i] * h[i + 1];
        h[i + 1]       = -cy.sn[i] * h[i] + cy.cs[i] * h[i + 1];
        h[i]           = t;
      }
      double rr;
      givens(h[j], invariant ? 0.0 : h[j + 1], cy.cs[j], cy.sn[j], rr);
      h[j]         = rr;
      h.resize(j + 1);
      cy.g[j + 1]  = -cy.sn[j] * cy.g[j];
      cy.g[j]      = cy.cs[j] * cy.g[j];
      cond.push_column(h);
      cy.R.push_back(std::move(h));
      ++k;
      ++rep.iters;

      const double kappa = cond.kappa();
      const double est   = std::abs(cy.g[j + 1]) / bnorm;
      rel_hist.push_back(est);
      rep.history.push_back({rep.iters, rep.matvecs, est, kappa});

      const bool singular_R = std::abs(cy.R[j][j]) <= kEps * cond.smax();
      if (singular_R) {
        if (null_mode) {
          // A Z y = 0 for the null vector y of R: an exact null direction
          const auto y = cy.null_vector(j);
          std::fill(rep.x.begin(), rep.x.end(), 0.0);
          cy.combine(y, rep.x);
          finish(KspExit::tol);
        } else {
          --k;  // drop the dependent direction
          finish(KspExit::breakdown);
        }
        cycle_break = true;
        break;
      }
      if (est <= opts.rtol) {
        cycle_break = true;
        break;
      }
      if (invariant) {
        finish(KspExit::breakdown);
        cycle_break = true;
        break;
      }
      if (null_mode) {
        DenseVector xk;
        const auto  d = nullspace_stop(monitor, kappa, [&] {
          xk = rep.x;
          cy.combine(cy.solve(k), xk);
          A.apply(xk, ax);
          ++rep.matvecs;
          const double xn  = vec_norm1(xk);
          const double rel = xn > 0.0 ? vec_norm1(ax) / (opts.null.a_norm1 * xn)
                                      : std::numeric_limits<double>::infinity();
          if (opts.on_null_check) opts.on_null_check(rel);
          return rel;
        });
        if (d != NullDecision::skipped && monitor.improved()) best_x = xk;
        if (d == NullDecision::converged || d == NullDecision::stagnated) {
          rep.x = best_x;
          finish(d == NullDecision::converged ? KspExit::tol : KspExit::nullspace_stagnation);
          cycle_break = true;
          break;
        }
      }
      if (opts.mode == KspMode::mpbw && mpbw_check(kappa, rel_hist, opts.mpbw)) {
        finish(KspExit::mpbw);
        cycle_break = true;
        break;
      }
    }
    (void)cycle_break;

    const bool x_set = done && (rep.exit == KspExit::tol || rep.exit == KspExit::nullspace_stagnation) &&
                       null_mode;
    if (!x_set) cy.combine(cy.solve(k), rep.x);

    if (opts.keep_state) {
      KrylovState st;
      st.Q = DenseMatrix(n, cy.Q.size());
      for (std::size_t c = 0; c < cy.Q.size(); ++c)
        std::copy(cy.Q[c].begin(), cy.Q[c].end(), st.Q.col(c).begin());
      st.Z = DenseMatrix(n, cy.Z.size());
      for (std::size_t c = 0; c < cy.Z.size(); ++c)
        std::copy(cy.Z[c].begin(), cy.Z[c].end(), st.Z.col(c).begin());
      st.H = DenseMatrix(cy.Hraw.size() + 1, cy.Hraw.size());
      for (std::size_t c = 0; c < cy.Hraw.size(); ++c)
        for (std::size_t i = 0; i < cy.Hraw[c].size(); ++i) st.H(i, c) = cy.Hraw[c][i];
      st.givens_c    = cy.cs;
      st.givens_s    = cy.sn;
      st.res_history = rel_hist;
      rep.state      = std::move(st);
    }
    if (done) break;

    // restart from the true residual
    A.apply(rep.x, ax);
    ++rep.matvecs;
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    beta = vec_norm2(r);
    if (beta / bnorm <= opts.rtol) {
      finish(KspExit::tol);
      break;
    }
    if (rep.iters >= opts.maxit) {
      if (null_mode && !best_x.empty()) rep.x = best_x;
      finish(KspExit::restart_limit);
      break;
    }
  }
  std::size_t mv = 0;
  rep.rel_res    = true_rel(A, b, rep.x, bnorm, mv);
  rep.matvecs += mv;
  return rep;
}

SolveReport gmres(const LinearOperator &A, const LinearOperator &G, std::span<const double> b,
                  const KspOptions &opts) {
  KspOptions o = opts;
  o.ortho      = Ortho::mgs;
  return fgmres(A, fixed_preconditioner(G), b, o);
}

SolveReport gmres(const SparseMatrix &A, const LinearOperator &G, std::span<const double> b,
                  std::size_t restart, double rtol, std::size_t maxit) {
  const MatrixOperator op(A);
  KspOptions           o;
  o.restart = restart;
  o.rtol    = rtol;
  o.maxit   = maxit;
  return gmres(op, G, b, o);
}

}  // namespace hifir
