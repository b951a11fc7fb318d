#include "hifir/rrqr.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "hifir/condest.hpp"

namespace hifir {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double col_norm(const DenseMatrix &A, std::size_t j, std::size_t from) {
  return vec_norm2(A.col(j).subspan(from));
}

/// apply H = I - tau [1; v] [1; v]^T stored in column k to x(k:m)
void apply_reflector(const DenseMatrix &qr, double tau, std::size_t k, std::span<double> x) {
  if (tau == 0.0) return;
  const std::size_t m = qr.rows();
  double            s = x[k];
  for (std::size_t i = k + 1; i < m; ++i) s += qr(i, k) * x[i];
  s *= tau;
  x[k] -= s;
  for (std::size_t i = k + 1; i < m; ++i) x[i] -= s * qr(i, k);
}

DenseVector diag_for(const QrcpFactors &f, SchurMode mode, std::size_t &r) {
  const std::size_t n = f.size();
  DenseVector       d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = f.qr(i, i);
  if (mode == SchurMode::truncated) {
    r = f.rank_trunc;
    return d;
  }
  r = n;
  const double r11   = n ? std::abs(d[0]) : 0.0;
  const double floor = r11 > 0.0 ? kEps * r11 : kEps;
  for (auto &v : d)
    if (std::abs(v) < floor) v = v < 0.0 ? -floor : floor;
  return d;
}

}  // namespace

DenseMatrix QrcpFactors::R() const {
  const std::size_t n = qr.rows(), m = qr.cols();
  DenseMatrix       R(n, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i <= std::min(j, n - 1); ++i) R(i, j) = qr(i, j);
  return R;
}

DenseMatrix QrcpFactors::Q() const {
  const std::size_t m = qr.rows();
  DenseMatrix       Q = DenseMatrix::identity(m);
  for (std::size_t j = 0; j < m; ++j) apply_q(Q.col(j));
  return Q;
}

void QrcpFactors::apply_qt(std::span<double> x) const {
  if (x.size() != qr.rows()) throw DimensionError("apply_qt: length mismatch");
  for (std::size_t k = 0; k < tau.size(); ++k) apply_reflector(qr, tau[k], k, x);
}

void QrcpFactors::apply_q(std::span<double> x) const {
  if (x.size() != qr.rows()) throw DimensionError("apply_q: length mismatch");
  for (std::size_t k = tau.size(); k-- > 0;) apply_reflector(qr, tau[k], k, x);
}

bool QrcpFactors::ill_conditioned(double kappa) const {
  const std::size_t n = size();
  if (n == 0) return false;
  const double r11 = std::abs(qr(0, 0)), rnn = std::abs(qr(n - 1, n - 1));
  return rnn == 0.0 || r11 > kappa * rnn;
}

QrcpFactors qrcp(const DenseMatrix &S) {
  const std::size_t m = S.rows(), n = S.cols();
  if (m != n) throw DimensionError("qrcp: Schur complement must be square");
  QrcpFactors f;
  f.qr = S;
  for (double v : S.data())
    if (!std::isfinite(v)) throw std::invalid_argument("qrcp: non-finite entry");
  auto &A = f.qr;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  DenseVector vn1(n), vn2(n);
  for (std::size_t j = 0; j < n; ++j) vn1[j] = vn2[j] = col_norm(A, j, 0);
  f.tau.assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t j = k + 1; j < n; ++j)
      if (vn1[j] > vn1[p]) p = j;
    if (p != k) {
      for (std::size_t i = 0; i < m; ++i) std::swap(A(i, k), A(i, p));
      std::swap(perm[k], perm[p]);
      std::swap(vn1[k], vn1[p]);
      std::swap(vn2[k], vn2[p]);
    }

    // reflector annihilating A(k+1:m, k)
    const double alpha = A(k, k);
    const double xnorm = k + 1 < m ? col_norm(A, k, k + 1) : 0.0;
    if (xnorm != 0.0) {
      const double beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
      f.tau[k]          = (beta - alpha) / beta;
      const double sc   = 1.0 / (alpha - beta);
      for (std::size_t i = k + 1; i < m; ++i) A(i, k) *= sc;
      A(k, k) = beta;
    }
    for (std::size_t j = k + 1; j < n; ++j) apply_reflector(A, f.tau[k], k, A.col(j));

    for (std::size_t j = k + 1; j < n; ++j) {
      if (vn1[j] == 0.0) continue;
      const double ratio = std::abs(A(k, j)) / vn1[j];
      const double t     = std::max(0.0, (1.0 - ratio) * (1.0 + ratio));
      const double down  = vn1[j] * std::sqrt(t);
      if (down <= 1e-2 * vn2[j]) {
        vn1[j] = k + 1 < m ? col_norm(A, j, k + 1) : 0.0;
        vn2[j] = vn1[j];
      } else {
        vn1[j] = down;
      }
    }
  }
  f.perm = PermVec(std::move(perm));

  const double r11 = n ? std::abs(A(0, 0)) : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(A(i, i)) > kEps * r11 * static_cast<double>(n)) ++f.rank_full;
  f.rank_trunc = std::min(estimate_rank(f, 1e10), f.rank_full);
  return f;
}

std::size_t estimate_rank(const QrcpFactors &f, double kappa_max) {
  const std::size_t n = f.size();
  if (n == 0 || f.qr(0, 0) == 0.0) return 0;
  IncrementalCondition ice;
  DenseVector          col;
  for (std::size_t k = 0; k < n; ++k) {
    col.assign(f.qr.col(k).begin(), f.qr.col(k).begin() + static_cast<std::ptrdiff_t>(k + 1));
    const auto [smax, smin] = ice.peek(col);
    if (!(smax <= kappa_max * smin)) return k;
    ice.push_column(col);
  }
  return n;
}

DenseVector schur_solve(const QrcpFactors &f, std::span<const double> u, SchurMode mode) {
  const std::size_t n = f.size();
  if (u.size() != n) throw DimensionError("schur_solve: length mismatch");
  std::size_t r = 0;
  const auto  d = diag_for(f, mode, r);
  DenseVector c(u.begin(), u.end());
  f.apply_qt(c);
  DenseVector y(n, 0.0);
  for (std::size_t i = r; i-- > 0;) {
    double s = c[i];
    for (std::size_t j = i + 1; j < r; ++j) s -= f.qr(i, j) * y[j];
    y[i] = s / d[i];
  }
  DenseVector x(n);
  for (std::size_t j = 0; j < n; ++j) x[f.perm[j]] = y[j];
  return x;
}

DenseVector schur_solve_t(const QrcpFactors &f, std::span<const double> u, SchurMode mode) {
  const std::size_t n = f.size();
  if (u.size() != n) throw DimensionError("schur_solve_t: length mismatch");
  std::size_t r = 0;
  const auto  d = diag_for(f, mode, r);
  DenseVector z(n, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    double s = u[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.qr(j, i) * z[j];
    z[i] = s / d[i];
  }
  f.apply_q(z);
  return z;
}

}  // namespace hifir
