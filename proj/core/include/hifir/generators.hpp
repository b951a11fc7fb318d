/// \file hifir/generators.hpp
/// \brief Singular finite-difference test matrices on structured 2-D grids
///
/// Unknown (i, j) of an nx-by-ny grid is stored at index i + nx * j. Both
/// generators use ghost-point reflection at the boundary, so every row sums
/// to zero and the constant vector spans the right null space.

#pragma once

#include <array>

#include "hifir/sparse.hpp"

namespace hifir {

/// \brief Neumann Laplacian, nonsymmetric because of the boundary folding
SparseMatrix gen_neumann(std::size_t nx, std::size_t ny);

/// \brief Neumann Laplacian plus first-order upwind advection
///
/// The advection term is scaled by the mesh width h = 1 / (max(nx, ny) - 1),
/// which corresponds to -lap(u) + v . grad(u) multiplied through by h^2.
SparseMatrix gen_advection_diffusion(std::size_t nx, std::size_t ny,
                                     std::array<double, 2> velocity);

}  // namespace hifir
