#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace hifir;
using testing_helpers::random_sparse;

namespace {

IluParams exact_params() {
  IluParams p = IluParams::no_drop();
  p.tau       = std::numeric_limits<double>::infinity();
  return p;
}

/// W A V permuted by the level's row and column orders
oracle::Mat level_input(const SparseMatrix &A, const LevelFactor &f) {
  const auto B = permute(apply_scaling(A, f.scaling), f.perm_row, f.perm_col);
  return oracle::from_sparse(B);
}

/// [L_B 0; L_E I] diag(D_B, S) [U_B U_F; 0 I]
oracle::Mat level_product(const LevelFactor &f, const SparseMatrix &S) {
  const std::size_t n = f.size(), nk = f.n_kept;
  oracle::Mat       L = oracle::Mat::identity(n), D(n, n), U = oracle::Mat::identity(n);
  const auto        lb = oracle::from_sparse(f.L_B), le = oracle::from_sparse(f.L_E);
  const auto        ub = oracle::from_sparse(f.U_B), uf = oracle::from_sparse(f.U_F);
  const auto        s  = oracle::from_sparse(S);
  for (std::size_t i = 0; i < nk; ++i) {
    for (std::size_t j = 0; j < nk; ++j) {
      L(i, j) += lb(i, j);
      U(i, j) += ub(i, j);
    }
    for (std::size_t j = 0; j < n - nk; ++j) U(i, nk + j) = uf(i, j);
    D(i, i) = f.D_B[i];
  }
  for (std::size_t i = 0; i < n - nk; ++i) {
    for (std::size_t j = 0; j < nk; ++j) L(nk + i, j) = le(i, j);
    for (std::size_t j = 0; j < n - nk; ++j) D(nk + i, nk + j) = s(i, j);
  }
  return oracle::mul(oracle::mul(L, D), U);
}

}  // namespace

TEST(CroutLdu, ExactOnSpdMatchesDenseLdu) {
  const oracle::Mat M = [] {
    oracle::Mat m(4, 4);
    const double v[4][4] = {{4, 1, 0, 0.5}, {1, 3, 0.25, 0}, {0, 0.25, 2, 0.1}, {0.5, 0, 0.1, 1}};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = v[i][j];
    return m;
  }();
  const auto res = crout_ldu(oracle::to_sparse(M), 4, exact_params());
  ASSERT_EQ(res.n_kept, 4u);
  EXPECT_EQ(res.order, (std::vector<std::size_t>{0, 1, 2, 3}));
  const auto ref = oracle::dense_ldu(M);
  const auto L   = oracle::from_sparse(res.L_B), U = oracle::from_sparse(res.U_B);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(res.D_B[i], ref.d[i], 1e-14 * std::abs(ref.d[i]));
    for (std::size_t j = 0; j < 4; ++j) {
      if (i > j) EXPECT_NEAR(L(i, j), ref.L(i, j), 1e-14);
      if (i < j) EXPECT_NEAR(U(i, j), ref.U(i, j), 1e-14);
    }
  }
}

TEST(CroutLdu, DiagonalMatrix) {
  const auto A   = SparseMatrix::from_triplets(3, 3, {{0, 0, 2.0}, {1, 1, -1.5}, {2, 2, 1.0}});
  const auto res = crout_ldu(A, 3, IluParams{});
  EXPECT_EQ(res.n_kept, 3u);
  EXPECT_EQ(res.L_B.nnz(), 0u);
  EXPECT_EQ(res.U_B.nnz(), 0u);
  EXPECT_EQ(res.D_B, (DenseVector{2.0, -1.5, 1.0}));
  EXPECT_EQ(res.schur.rows(), 0u);
}

TEST(CroutLdu, TinyPivotDeferredDynamically) {
  const double eps = std::numeric_limits<double>::epsilon();
  const auto   A   = SparseMatrix::from_triplets(2, 2, {{0, 0, eps}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
  const auto   res = crout_ldu(A, 2, IluParams{});
  EXPECT_EQ(res.n_kept, 1u);
  EXPECT_EQ(res.order, (std::vector<std::size_t>{1, 0}));
  EXPECT_DOUBLE_EQ(res.D_B[0], 1.0);
  ASSERT_EQ(res.schur.rows(), 1u);
  EXPECT_DOUBLE_EQ(res.schur.at(0, 0), eps - 1.0);
}

TEST(CroutLdu, CandidatesBeyondLimitDeferred) {
  const auto res = crout_ldu(SparseMatrix::identity(4), 2, IluParams{});
  EXPECT_EQ(res.n_kept, 2u);
  EXPECT_EQ(res.schur, SparseMatrix::identity(2));
}

TEST(FactorLevel, ExactReconstructionRandom) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto      A   = random_sparse(20, 3, rng, 3.0);
    const auto      out = factor_level(A, exact_params());
    ASSERT_FALSE(out.qr_switch);
    const auto lhs = level_input(A, out.factor);
    const auto rhs = level_product(out.factor, out.schur);
    EXPECT_LE(oracle::fro(oracle::sub(lhs, rhs)), 1e-12 * oracle::fro(lhs)) << "seed " << seed;
  }
}

TEST(FactorLevel, ReconstructionWithDeferrals) {
  // tau = 5 defers some pivots; the block identity must still hold with the Schur
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const auto      A = random_sparse(30, 3, rng);
    IluParams       p = IluParams::no_drop();
    const auto      out = factor_level(A, p);
    if (out.qr_switch) continue;
    const auto lhs = level_input(A, out.factor);
    const auto rhs = level_product(out.factor, out.schur);
    EXPECT_LE(oracle::fro(oracle::sub(lhs, rhs)), 1e-11 * oracle::fro(lhs)) << "seed " << seed;
  }
}

TEST(FactorLevel, PivotSpreadBoundedByTau) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(200 + seed);
    const auto      A   = random_sparse(40, 3, rng);
    const auto      out = factor_level(A, IluParams{});
    if (out.factor.D_B.empty()) continue;
    double dmax = 0.0;
    for (double d : out.factor.D_B) dmax = std::max(dmax, std::abs(d));
    for (double d : out.factor.D_B) {
      EXPECT_GT(std::abs(d), 0.0);
      EXPECT_GE(std::abs(d), dmax / IluParams{}.tau * (1 - 1e-15));
    }
  }
}

TEST(FactorLevel, RetainedFillBound) {
  for (double alpha : {1.0, 2.0, 3.0}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(alpha * 10));
    const auto      A = random_sparse(60, 3, rng, 2.0);
    IluParams       p;
    p.alpha   = alpha;
    p.droptol = 0.0;
    const auto  out = factor_level(A, p);
    const auto &f   = out.factor;
    const auto  At  = A.transpose();
    const auto  cap = [&](std::size_t nz) {
      return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(std::max<std::size_t>(nz, 1))));
    };
    const auto ubt = f.U_B.transpose(), uft = f.U_F.transpose();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::size_t lrow = k < f.n_kept ? f.L_B.row_nnz(k) : f.L_E.row_nnz(k - f.n_kept);
      const std::size_t ucol = k < f.n_kept ? ubt.row_nnz(k) : uft.row_nnz(k - f.n_kept);
      EXPECT_LE(lrow, cap(A.row_nnz(f.perm_row[k])));
      EXPECT_LE(ucol, cap(At.row_nnz(f.perm_col[k])));
    }
  }
}

TEST(FactorLevel, AllDeferredSwitchesToQr) {
  // an all-zero matrix defers every index statically
  const auto A   = SparseMatrix::from_triplets(3, 3, {});
  const auto out = factor_level(A, IluParams{});
  EXPECT_TRUE(out.qr_switch);
  EXPECT_EQ(out.schur, A);
}

TEST(BuildHierarchy, DiagonallyDominantSingleLevel) {
  std::mt19937_64 rng(4);
  const auto      A = random_sparse(10, 2, rng, 20.0);
  const auto      h = build_hierarchy(A, IluParams{});
  EXPECT_EQ(h.levels.size(), 1u);
  EXPECT_LE(h.final_schur.rows(), 100u);
}

TEST(BuildHierarchy, SingularNeumannKeepsFinalSchur) {
  const auto h = build_hierarchy(gen_neumann(8, 8), IluParams{});
  EXPECT_GE(h.final_schur.rows(), 1u);
}

TEST(BuildHierarchy, PermutationResolvedByMatching) {
  const auto A = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  const auto h = build_hierarchy(A, IluParams{});
  ASSERT_EQ(h.levels.size(), 1u);
  EXPECT_EQ(h.levels[0].n_kept, 2u);
  EXPECT_EQ(h.final_schur.rows(), 0u);
}

TEST(BuildHierarchy, LevelSizesDecrease) {
  IluParams p;
  p.min_schur = 5;
  for (const auto &A : {gen_neumann(20, 20), gen_advection_diffusion(20, 20, {1.0, 1.0})}) {
    const auto  h    = build_hierarchy(A, p);
    std::size_t prev = A.rows() + 1;
    std::size_t sum  = 0;
    for (const auto &l : h.levels) {
      EXPECT_LT(l.size(), prev);
      EXPECT_GE(l.n_kept, 1u);
      prev = l.size();
      sum += l.n_kept;
    }
    EXPECT_EQ(sum + h.final_schur.rows(), A.rows());
  }
}

TEST(IluParams, Validation) {
  IluParams p;
  p.alpha = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p       = IluParams{};
  p.droptol = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p     = IluParams{};
  p.tau = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_NO_THROW(IluParams::no_drop().validate());
}
