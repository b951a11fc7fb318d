#include <limits>
#include "hifir/nullspace.hpp"

#include <cmath>
#include <random>

namespace hifir {

namespace {

void reflect(std::span<const double> u, std::size_t k, std::span<double> x) {
  const double s = 2.0 * dot(u.subspan(k), std::span<const double>(x).subspan(k));
  for (std::size_t i = k; i < x.size(); ++i) x[i] -= s * u[i];
}

}  // namespace

void HouseholderBasis::apply_qt(std::span<double> x) const {
  if (x.size() != n_) throw DimensionError("HouseholderBasis: length mismatch");
  for (std::size_t k = 0; k < us_.size(); ++k) reflect(us_[k], k, x);
}

void HouseholderBasis::apply_q(std::span<double> x) const {
  if (x.size() != n_) throw DimensionError("HouseholderBasis: length mismatch");
  for (std::size_t k = us_.size(); k-- > 0;) reflect(us_[k], k, x);
}

void HouseholderBasis::project_out(std::span<double> x) const {
  apply_qt(x);
  for (std::size_t k = 0; k < us_.size(); ++k) x[k] = 0.0;
  apply_q(x);
}

bool HouseholderBasis::append(std::span<const double> x) {
  const std::size_t k = us_.size();
  if (k >= n_) return false;
  DenseVector y(x.begin(), x.end());
  apply_qt(y);
  const double nrm = vec_norm2(std::span<const double>(y).subspan(k));
  const double tol = static_cast<double>(n_) * std::numeric_limits<double>::epsilon() * vec_norm2(x);
  if (nrm <= tol || !std::isfinite(nrm)) return false;
  const double alpha = y[k] > 0.0 ? -nrm : nrm;
  DenseVector  u(n_, 0.0);
  for (std::size_t i = k; i < n_; ++i) u[i] = y[i];
  u[k] -= alpha;
  const double un = vec_norm2(u);
  for (auto &v : u) v /= un;
  us_.push_back(std::move(u));
  return true;
}

DenseVector HouseholderBasis::column(std::size_t j) const {
  if (j >= us_.size()) throw std::out_of_range("HouseholderBasis::column");
  DenseVector e(n_, 0.0);
  e[j] = 1.0;
  for (std::size_t k = j + 1; k-- > 0;) reflect(us_[k], k, e);
  return e;
}

void NullSpaceBasis::project_out(std::span<double> x) const {
  if (V.cols() == 0) return;
  if (x.size() != V.rows()) throw DimensionError("NullSpaceBasis: length mismatch");
  if (qr_store.cols() == V.cols()) {
    qr_store.project_out(x);
    return;
  }
  for (std::size_t j = 0; j < V.cols(); ++j) {
    const double c = dot(V.col(j), x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * V(i, j);
  }
}

DenseVector seed_rhs(const LinearOperator &G, const LinearOperator &A, std::span<const double> q,
                     bool schur_illcond, const NullSpaceOptions &opts) {
  if (schur_illcond || opts.n_pre == 0) return {q.begin(), q.end()};
  RefineParams p = opts.hifir;
  p.beta_hi      = opts.seed_beta_hi;
  p.maxiter      = opts.n_pre;
  auto res       = hifir_refine(G, A, q, p);
  const double nrm = vec_norm2(res.x);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) return {q.begin(), q.end()};
  for (auto &v : res.x) v /= nrm;
  return std::move(res.x);
}

NullSpaceBasis compute_nullspace(const LinearOperator &A, double a_norm1, const LinearOperator &G,
                                 bool schur_illcond, const NullSpaceOptions &opts) {
  const std::size_t n = A.size();
  if (G.size() != n) throw DimensionError("compute_nullspace: operator sizes differ");
  NullSpaceBasis out;
  out.qr_store = HouseholderBasis(n);
  HouseholderBasis         seeds(n);
  std::mt19937_64          rng(opts.seed);
  std::normal_distribution<double> gauss;
  std::vector<DenseVector> cols;
  const std::size_t        max_dim = std::min(opts.max_dim, n);

  auto next_seed = [&](std::size_t i) {
    DenseVector g(n);
    do {
      for (auto &v : g) v = gauss(rng);
    } while (!seeds.append(g));
    return seeds.column(i);
  };

  DenseVector av(n);
  for (std::size_t i = 0; i < max_dim; ++i) {
    const DenseVector q = next_seed(i);
    DenseVector       cand;
    if (a_norm1 == 0.0) {
      cand = q;  // every vector is a null vector
    } else {
      const DenseVector b   = seed_rhs(G, A, q, schur_illcond, opts);
      KspOptions        k   = opts.ksp;
      k.mode                = KspMode::nullspace;
      k.null.a_norm1        = a_norm1;
      k.null.schur_flag     = schur_illcond;
      const auto        rep = fgmres(A, hifir_preconditioner(G, A, opts.hifir), b, k);
      out.fgmres_iterations += rep.iters;
      out.matvecs += rep.matvecs;
      cand = rep.x;
    }
    HouseholderBasis trial = out.qr_store;
    if (!trial.append(cand)) break;
    const DenseVector v = trial.column(i);
    A.apply(v, av);
    ++out.matvecs;
    const double res = a_norm1 == 0.0 ? 0.0 : vec_norm1(av) / (a_norm1 * vec_norm1(v));
    if (!(res <= opts.tol_null)) {
      out.rejected_residual = res;
      break;
    }
    out.qr_store = std::move(trial);
    out.residuals_1norm.push_back(res);
    cols.push_back(v);
  }
  out.V = DenseMatrix(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    std::copy(cols[j].begin(), cols[j].end(), out.V.col(j).begin());
  return out;
}

NullSpaceBasis compute_nullspace(const SparseMatrix &A, const HifFactorization &G,
                                 const NullSpaceOptions &opts) {
  const MatrixOperator op(A);
  const auto           gv = G.view(SchurMode::untruncated);
  return compute_nullspace(op, norm1(A), gv, G.schur_ill_conditioned(), opts);
}

NullSpaceBasis lns(const SparseMatrix &A, const HifFactorization &G,
                   const NullSpaceOptions &opts) {
  const MatrixOperator     op(A);
  const TransposedOperator opt(op);
  const auto               gv = G.view(SchurMode::untruncated);
  const TransposedOperator gvt(gv);
  return compute_nullspace(opt, norm_inf(A), gvt, G.schur_ill_conditioned(), opts);
}

}  // namespace hifir
