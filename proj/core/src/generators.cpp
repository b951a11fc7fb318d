#include "hifir/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hifir {

namespace {

/// 1-D operator in tridiagonal form; entries (sub, diag, sup) per row
struct Tridiag {
  std::vector<double> lo, di, up;
  explicit Tridiag(std::size_t n) : lo(n, 0.0), di(n, 0.0), up(n, 0.0) {}
};

/// second difference with reflected ghost points: the missing neighbour's
/// coefficient folds onto the mirrored interior neighbour
Tridiag neumann_1d(std::size_t n) {
  Tridiag t(n);
  if (n == 1) return t;
  for (std::size_t i = 0; i < n; ++i) {
    t.di[i] = 2.0;
    if (i > 0) t.lo[i] = -1.0;
    if (i + 1 < n) t.up[i] = -1.0;
  }
  t.up[0]     = -2.0;
  t.lo[n - 1] = -2.0;
  return t;
}

/// first-order upwind difference of speed v (already scaled by h)
void add_upwind(Tridiag &t, double v) {
  const std::size_t n = t.di.size();
  if (n == 1 || v == 0.0) return;
  // snap to a dyadic grid so every row sum is computed without rounding
  const double a = std::ldexp(std::round(std::ldexp(std::abs(v), 40)), -40);
  for (std::size_t i = 0; i < n; ++i) {
    t.di[i] += a;
    if (v > 0.0) {
      // upstream neighbour is i-1; ghost at -1 reflects onto 1
      if (i > 0)
        t.lo[i] -= a;
      else
        t.up[i] -= a;
    } else {
      if (i + 1 < n)
        t.up[i] -= a;
      else
        t.lo[i] -= a;
    }
  }
}

/// A = I_ny (x) Tx + Ty (x) I_nx
SparseMatrix assemble(const Tridiag &tx, const Tridiag &ty) {
  const std::size_t nx = tx.di.size(), ny = ty.di.size();
  if (nx != 0 && ny > std::numeric_limits<std::size_t>::max() / nx)
    throw std::overflow_error("grid size overflows");
  const std::size_t    n = nx * ny;
  std::vector<Triplet> trips;
  trips.reserve(5 * n);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t r = i + nx * j;
      // accumulate in a fixed order so each diagonal is a plain sum of the two
      // 1-D contributions and row sums cancel exactly
      trips.push_back({r, r, tx.di[i] + ty.di[j]});
      if (i > 0 && tx.lo[i] != 0.0) trips.push_back({r, r - 1, tx.lo[i]});
      if (i + 1 < nx && tx.up[i] != 0.0) trips.push_back({r, r + 1, tx.up[i]});
      if (j > 0 && ty.lo[j] != 0.0) trips.push_back({r, r - nx, ty.lo[j]});
      if (j + 1 < ny && ty.up[j] != 0.0) trips.push_back({r, r + nx, ty.up[j]});
    }
  return SparseMatrix::from_triplets(n, n, std::move(trips));
}

}  // namespace

SparseMatrix gen_neumann(std::size_t nx, std::size_t ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("gen_neumann: nx, ny must be >= 1");
  return assemble(neumann_1d(nx), neumann_1d(ny));
}

SparseMatrix gen_advection_diffusion(std::size_t nx, std::size_t ny,
                                     std::array<double, 2> velocity) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("gen_advection_diffusion: nx, ny must be >= 2");
  if (!std::isfinite(velocity[0]) || !std::isfinite(velocity[1]))
    throw std::invalid_argument("gen_advection_diffusion: velocity must be finite");
  const double h  = 1.0 / static_cast<double>(std::max(nx, ny) - 1);
  auto         tx = neumann_1d(nx);
  auto         ty = neumann_1d(ny);
  add_upwind(tx, h * velocity[0]);
  add_upwind(ty, h * velocity[1]);
  return assemble(tx, ty);
}

}  // namespace hifir
