#include <benchmark/benchmark.h>

#include <random>

#include <hifir/hifir.hpp>

using namespace hifir;

namespace {

SparseMatrix grid(std::int64_t n) {
  return gen_advection_diffusion(static_cast<std::size_t>(n), static_cast<std::size_t>(n), {1.0, 1.0});
}

DenseVector random_vector(std::size_t n) {
  std::mt19937_64                  rng(1);
  std::normal_distribution<double> g;
  DenseVector                      v(n);
  for (auto &x : v) x = g(rng);
  return v;
}

void BM_Spmv(benchmark::State &st) {
  const auto A = grid(st.range(0));
  const auto x = random_vector(A.cols());
  DenseVector y(A.rows());
  for (auto _ : st) {
    spmv(A, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * A.nnz()));
}
BENCHMARK(BM_Spmv)->Arg(64)->Arg(256);

void BM_Factor(benchmark::State &st) {
  const auto A = grid(st.range(0));
  for (auto _ : st) {
    auto G = HifFactorization::build(A);
    benchmark::DoNotOptimize(G.nnz());
  }
}
BENCHMARK(BM_Factor)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HifApply(benchmark::State &st) {
  const auto A = grid(st.range(0));
  const auto G = HifFactorization::build(A);
  const auto b = random_vector(A.rows());
  DenseVector x(A.rows());
  for (auto _ : st) {
    G.apply(b, x, SchurMode::truncated);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_HifApply)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_GmresHif(benchmark::State &st) {
  const auto  A = grid(st.range(0));
  const auto  G = HifFactorization::build(A);
  const auto  y = random_vector(A.rows());
  DenseVector b(A.rows());
  spmv(A, y, b);
  for (auto _ : st) {
    auto rep = gmres(A, G.view(SchurMode::truncated), b, 30, 1e-10, 500);
    benchmark::DoNotOptimize(rep.rel_res);
  }
}
BENCHMARK(BM_GmresHif)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NullSpace(benchmark::State &st) {
  const auto A = gen_neumann(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(0)));
  const auto G = HifFactorization::build(A);
  for (auto _ : st) {
    auto N = compute_nullspace(A, G);
    benchmark::DoNotOptimize(N.size());
  }
}
BENCHMARK(BM_NullSpace)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
