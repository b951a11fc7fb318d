#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace hifir;

namespace {

/// b = A y + (left null vector) so that A x = b has no solution
DenseVector inconsistent_rhs(const SparseMatrix &A, std::uint64_t seed) {
  const std::size_t n = A.rows();
  std::mt19937_64   rng(seed);
  const auto        y = oracle::random_vector(n, rng);
  DenseVector       b(n);
  spmv(A, y, b);
  const auto U = oracle::dense_nullspace(oracle::transpose(oracle::from_sparse(A)));
  for (std::size_t j = 0; j < U.cols; ++j)
    for (std::size_t i = 0; i < n; ++i) b[i] += 0.5 * U(i, j) * oracle::norm2(b);
  return b;
}

void expect_matches_pinv(const SparseMatrix &A, std::span<const double> b, const PipitResult &r) {
  const auto ref = oracle::dense_pinv_apply(oracle::from_sparse(A), b);
  EXPECT_LE(r.normal_res, 1e-11);
  EXPECT_LE(testing_helpers::rel_diff(r.x_pi, ref), 1e-8);
  EXPECT_NEAR(oracle::norm2(r.x_pi), oracle::norm2(ref), 1e-8 * oracle::norm2(ref));
}

}  // namespace

TEST(Pipit, NeumannInconsistent) {
  const auto A = gen_neumann(10, 10);
  const auto b = inconsistent_rhs(A, 1);
  const auto r = pipit_solve(A, b);
  EXPECT_EQ(r.lns_basis.size(), 1u);
  EXPECT_EQ(r.rns_basis.size(), 1u);
  EXPECT_FALSE(r.rns_supplied);
  expect_matches_pinv(A, b, r);
}

TEST(Pipit, AdvectionDiffusionInconsistent) {
  for (std::size_t nx : {6u, 12u}) {
    const auto A = gen_advection_diffusion(nx, nx, {1.0, 1.0});
    const auto b = inconsistent_rhs(A, nx);
    const auto r = pipit_solve(A, b);
    EXPECT_TRUE(r.ls_report.converged());
    expect_matches_pinv(A, b, r);
  }
}

TEST(Pipit, KnownConstantModeGivesSameAnswer) {
  const auto A   = gen_advection_diffusion(8, 8, {1.0, 0.5});
  const auto b   = inconsistent_rhs(A, 2);
  const auto rns = basis_from_vectors({DenseVector(64, 1.0)});
  const auto r1  = pipit_solve(A, b, &rns);
  const auto r2  = pipit_solve(A, b);
  EXPECT_TRUE(r1.rns_supplied);
  EXPECT_LE(testing_helpers::rel_diff(r1.x_pi, r2.x_pi), 1e-9);
  expect_matches_pinv(A, b, r1);
}

TEST(Pipit, RankDeficientDenseAgainstOracle) {
  std::mt19937_64 rng(3);
  const auto      M = oracle::random_low_rank(20, 20, 17, rng);
  const auto      A = oracle::to_sparse(M);
  const auto      b = oracle::random_vector(20, rng);
  PipitOptions    o;
  o.hif          = HifParams{IluParams::no_drop(), 1e10};
  const auto r   = pipit_solve(A, b, nullptr, o);
  EXPECT_EQ(r.lns_basis.size(), 3u);
  EXPECT_EQ(r.rns_basis.size(), 3u);
  expect_matches_pinv(A, b, r);
}

TEST(Pipit, NonsingularReducesToSolve) {
  std::mt19937_64 rng(4);
  const auto      A = testing_helpers::random_sparse(25, 3, rng, 4.0);
  const auto      b = oracle::random_vector(25, rng);
  const auto      r = pipit_solve(A, b);
  EXPECT_EQ(r.lns_basis.size(), 0u);
  EXPECT_EQ(r.rns_basis.size(), 0u);
  EXPECT_EQ(r.x_pi, r.x_ls);
  EXPECT_LE(testing_helpers::rel_diff(r.x_pi, oracle::lu_solve(oracle::from_sparse(A), b)), 1e-10);
}

TEST(Pipit, NullSpaceTooLarge) {
  std::mt19937_64 rng(5);
  const auto      A = oracle::to_sparse(oracle::random_low_rank(15, 15, 12, rng));
  PipitOptions    o;
  o.hif          = HifParams{IluParams::no_drop(), 1e10};
  o.max_null_dim = 3;
  EXPECT_THROW(pipit_solve(A, DenseVector(15, 1.0), nullptr, o), PipitError);
}

TEST(Pipit, NonConvergenceCarriesPartialReport) {
  const auto   A = gen_neumann(12, 12);
  const auto   b = inconsistent_rhs(A, 6);
  PipitOptions o;
  o.hif.ilu.droptol = 0.3;
  o.hif.ilu.alpha   = 1.0;
  o.ksp.maxit       = 2;
  o.ksp.rtol        = 1e-15;
  for (bool fb : {false, true}) {
    o.allow_fallback = fb;
    try {
      pipit_solve(A, b, nullptr, o);
      ADD_FAILURE() << "expected PipitError";
    } catch (const PipitError &e) {
      ASSERT_TRUE(e.partial().has_value());
      EXPECT_EQ(e.partial()->fallback, fb);
      EXPECT_FALSE(e.partial()->converged());
    }
  }
}

TEST(Pipit, DimensionChecks) {
  const auto A = gen_neumann(4, 4);
  EXPECT_THROW(pipit_solve(A, DenseVector(15, 1.0)), DimensionError);
  const auto wrong = basis_from_vectors({DenseVector(10, 1.0)});
  EXPECT_THROW(pipit_solve(A, DenseVector(16, 1.0), &wrong), DimensionError);
}

TEST(BasisFromVectors, SkipsDependentVectors) {
  const auto B = basis_from_vectors({DenseVector{1, 1, 0}, DenseVector{2, 2, 0}, DenseVector{0, 0, 3}});
  ASSERT_EQ(B.size(), 2u);
  EXPECT_NEAR(std::abs(B.V(0, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(B.V(2, 1)), 1.0, 1e-15);
  EXPECT_THROW(basis_from_vectors({DenseVector(3, 1.0), DenseVector(2, 1.0)}), DimensionError);
  EXPECT_EQ(basis_from_vectors({}).size(), 0u);
}
