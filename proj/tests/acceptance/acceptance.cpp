/// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "helpers.hpp"

#ifdef HIFIR_HAVE_CLI
#include <nlohmann/json.hpp>

#include "cli.hpp"
#endif

using namespace hifir;
using testing_helpers::kEps;
using testing_helpers::operator_matrix;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool        pass = true;
  std::string detail;

  void check(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string &s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

oracle::Mat to_oracle(const DenseMatrix &M) {
  oracle::Mat out(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) out(i, j) = M(i, j);
  return out;
}

/// ||A x||_2 accumulated in long double, independent of the library kernels
double ref_apply_norm(const SparseMatrix &A, std::span<const double> x, bool transposed) {
  std::vector<long double> y(A.rows(), 0.0L);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto cols = A.row_indices(i);
    const auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (transposed)
        y[cols[k]] += static_cast<long double>(vals[k]) * x[i];
      else
        y[i] += static_cast<long double>(vals[k]) * x[cols[k]];
    }
  }
  long double s = 0.0L;
  for (auto v : y) s += v * v;
  return static_cast<double>(std::sqrt(s));
}

/// power iteration on A^T A; a lower bound on ||A||_2 that converges quickly
double ref_norm2(const SparseMatrix &A) {
  const std::size_t   n = A.cols();
  std::vector<double> x(n), y(A.rows()), z(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(0.37 * static_cast<double>(i) + 0.1);
  double est = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double xn = oracle::norm2(x);
    for (auto &v : x) v /= xn;
    spmv(A, x, y);
    spmv_t(A, y, z);
    const double next = std::sqrt(oracle::norm2(z));
    x.swap(z);
    if (std::abs(next - est) <= 1e-14 * next) return next;
    est = next;
  }
  return est;
}

/// orthogonality bookkeeping shared by criteria 1, 6 and 9
struct OrthoLog {
  double      worst_ratio = 0.0;  ///< max over runs of error / (100 n eps)
  std::size_t runs        = 0;
  void add(const oracle::Mat &Q) {
    if (Q.cols == 0) return;
    const double bound = 100.0 * static_cast<double>(Q.rows) * kEps;
    worst_ratio        = std::max(worst_ratio, oracle::orthogonality_error(Q) / bound);
    ++runs;
  }
};
OrthoLog g_null_ortho;

// ---------------------------------------------------------------- criterion 1

Verdict null_space_precision() {
  Verdict v;
  for (auto [grid, limit] : {std::pair<std::size_t, double>{64, 10.0}, {256, 120.0}}) {
    const auto A     = gen_neumann(grid, grid);
    const auto t0    = Clock::now();
    const auto G     = HifFactorization::build(A);
    const auto right = compute_nullspace(A, G);
    const auto left  = lns(A, G);
    const double t   = seconds_since(t0);
    const double a2  = ref_norm2(A);
    const std::string tag = std::to_string(grid) + "^2";
    v.check(right.size() == 1, tag + " rns dim " + std::to_string(right.size()));
    v.check(left.size() == 1, tag + " lns dim " + std::to_string(left.size()));
    double rr = 0.0, lr = 0.0;
    if (right.size() == 1) rr = ref_apply_norm(A, right.V.col(0), false) / a2;
    if (left.size() == 1) lr = ref_apply_norm(A, left.V.col(0), true) / a2;
    v.check(rr <= 100 * kEps, tag + " rns residual");
    v.check(lr <= 100 * kEps, tag + " lns residual");
    v.check(t <= limit, tag + " runtime");
    v.note(tag + ": rns " + fmt("%.2f", rr / kEps) + " eps, lns " + fmt("%.2f", lr / kEps) +
           " eps, " + fmt("%.1f s", t));
    g_null_ortho.add(to_oracle(right.V));
    g_null_ortho.add(to_oracle(left.V));
  }
  return v;
}

// ---------------------------------------------------------------- criterion 2

/// random n x n matrix of rank r with b in its range
struct SingularCase {
  oracle::Mat M;
  oracle::Vec b;
};

SingularCase singular_case(std::mt19937_64 &rng) {
  std::uniform_int_distribution<std::size_t> dim(4, 25);
  const std::size_t                          n = dim(rng);
  std::uniform_int_distribution<std::size_t> rk(1, n - 1);
  SingularCase                               c;
  c.M = oracle::random_low_rank(n, n, rk(rng), rng);
  c.b = oracle::mul(c.M, oracle::random_vector(n, rng));
  return c;
}

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(oracle::Mat M) : M_(std::move(M)) {}
  std::size_t size() const override { return M_.rows; }
  void        apply(std::span<const double> x, std::span<double> y) const override {
    const auto r = oracle::mul(M_, x);
    std::copy(r.begin(), r.end(), y.begin());
  }
  void apply_transpose(std::span<const double> x, std::span<double> y) const override {
    const auto r = oracle::mul(oracle::transpose(M_), x);
    std::copy(r.begin(), r.end(), y.begin());
  }

 private:
  oracle::Mat M_;
};

Verdict one_iteration_optimality() {
  Verdict         v;
  std::mt19937_64 rng(2024);
  const auto      t0 = Clock::now();
  std::size_t     ok_dense = 0, ok_hif = 0;
  double          worst    = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto           c = singular_case(rng);
    const auto           A = oracle::to_sparse(c.M);
    const MatrixOperator op(A);
    KspOptions           o;
    o.rtol = 1e-11;

    const DenseOperator Gd(oracle::dense_generalized_inverse(c.M));
    const auto          rd = gmres(op, Gd, c.b, o);
    const auto          F  = HifFactorization::build(A, HifParams{IluParams::no_drop(), 1e10});
    const auto          rh = gmres(op, F.view(SchurMode::truncated), c.b, o);
    ok_dense += rd.iters == 1 && rd.rel_res <= 1e-11;
    ok_hif += rh.iters == 1 && rh.rel_res <= 1e-11;
    worst = std::max({worst, rd.rel_res, rh.rel_res});
  }
  const double t = seconds_since(t0);
  v.check(ok_dense == 20, "dense generalized inverse " + std::to_string(ok_dense) + "/20");
  v.check(ok_hif == 20, "no-drop HIF " + std::to_string(ok_hif) + "/20");
  v.check(t < 1.0, "runtime");
  v.note("dense " + std::to_string(ok_dense) + "/20, HIF " + std::to_string(ok_hif) +
         "/20 in one iteration, worst rel_res " + fmt("%.1e", worst) + ", " + fmt("%.2f s", t));
  return v;
}

// ------------------------------------------------------------ criteria 3 and 4

struct GiStats {
  std::size_t cases = 0, ok_agi = 0, ok_proj = 0, ok_sigma = 0;
  double      worst_agi = 0.0, worst_proj = 0.0, min_sigma = 1e300;
  double      seconds = 0.0;
};

GiStats generalized_inverse_runs() {
  GiStats                                    s;
  std::mt19937_64                            rng(77);
  std::uniform_int_distribution<std::size_t> dim(10, 40);
  const auto                                 t_all = Clock::now();
  for (int k = 0; k < 50; ++k) {
    const std::size_t                          n = dim(rng);
    std::uniform_int_distribution<std::size_t> rk(1, n - 1);
    const std::size_t                          r = rk(rng);
    const auto                                 M = oracle::random_low_rank(n, n, r, rng);
    const auto                                 A = oracle::to_sparse(M);
    const auto F = HifFactorization::build(A, HifParams{IluParams::no_drop(), 1e10});
    const auto G = operator_matrix(F.view(SchurMode::truncated));
    const auto   AG   = oracle::mul(M, G);
    const double agi  = oracle::fro(oracle::sub(oracle::mul(AG, M), M)) / oracle::fro(M);
    const double proj = oracle::fro(oracle::sub(oracle::mul(AG, AG), AG));
    const double sig  = oracle::dense_svd(AG).s[r - 1];
    ++s.cases;
    s.ok_agi += agi <= 1e-10;
    s.ok_proj += proj <= 1e-10;
    s.ok_sigma += sig >= 1 - 1e-8;
    s.worst_agi  = std::max(s.worst_agi, agi);
    s.worst_proj = std::max(s.worst_proj, proj);
    s.min_sigma  = std::min(s.min_sigma, sig);
  }
  s.seconds = seconds_since(t_all);
  return s;
}

const GiStats &gi_stats() {
  static const GiStats s = generalized_inverse_runs();
  return s;
}

Verdict generalized_inverse_identity() {
  Verdict     v;
  const auto &s = gi_stats();
  v.check(s.ok_agi == s.cases, "||AGA - A|| bound " + std::to_string(s.ok_agi) + "/50");
  v.check(s.ok_proj == s.cases, "||(AG)^2 - AG|| bound " + std::to_string(s.ok_proj) + "/50");
  v.check(s.seconds < 5.0, "runtime");
  v.note("worst ||AGA-A||/||A|| " + fmt("%.1e", s.worst_agi) + ", worst ||(AG)^2-AG|| " +
         fmt("%.1e", s.worst_proj) + ", " + fmt("%.2f s", s.seconds));
  return v;
}

Verdict singular_value_bound() {
  Verdict     v;
  const auto &s = gi_stats();
  v.check(s.ok_sigma == s.cases, "sigma_r bound " + std::to_string(s.ok_sigma) + "/50");
  v.note("min sigma_r(AG) " + fmt("%.12f", s.min_sigma));
  return v;
}

// ---------------------------------------------------------------- criterion 5

Verdict consistent_systems() {
  Verdict v;
  struct Case {
    std::string  name;
    SparseMatrix A;
  };
  const std::vector<Case> cases = {{"neumann64", gen_neumann(64, 64)},
                                   {"advdiff32", gen_advection_diffusion(32, 32, {1.0, 1.0})}};
  for (const auto &c : cases) {
    std::mt19937_64 rng(5);
    const auto      y = oracle::random_vector(c.A.rows(), rng);
    DenseVector     b(c.A.rows());
    spmv(c.A, y, b);
    HifParams p;
    p.ilu.alpha   = 10.0;
    p.ilu.droptol = 1e-4;
    const auto F   = HifFactorization::build(c.A, p);
    const auto pre = gmres(c.A, F.view(SchurMode::truncated), b, 30, 1e-11, 90);
    const auto raw = gmres(c.A, IdentityOperator(c.A.rows()), b, 30, 1e-6, 500);
    v.check(pre.converged() && pre.rel_res <= 1e-11, c.name + " preconditioned");
    v.check(!raw.converged() && raw.rel_res > 1e-6, c.name + " unpreconditioned reached 1e-6");
    v.note(c.name + ": HIF " + std::to_string(pre.iters) + " its rel_res " +
           fmt("%.1e", pre.rel_res) + ", none " + fmt("%.1e", raw.rel_res) + " after " +
           std::to_string(raw.iters));
  }
  return v;
}

// ---------------------------------------------------------------- criterion 6

Verdict pipit_vs_oracle() {
  Verdict v;
  double  solve_time = 0.0;
  double  worst_nr = 0.0, worst_norm = 0.0;
  for (std::size_t grid : {8u, 16u, 24u, 32u}) {
    const auto A = gen_advection_diffusion(grid, grid, {1.0, 1.0});
    const auto M = oracle::from_sparse(A);
    const auto n = A.rows();
    // oracle null spaces: SVD when small, Householder QRCP at full size
    oracle::Mat U, V;
    if (n <= 300) {
      U = oracle::dense_nullspace(oracle::transpose(M));
      V = oracle::dense_nullspace(M);
    } else {
      U = oracle::left_null_householder(M, 1);
      V = oracle::left_null_householder(oracle::transpose(M), 1);
    }
    std::mt19937_64 rng(600 + grid);
    auto            b  = oracle::mul(M, oracle::random_vector(n, rng));
    const double    bn = oracle::norm2(b);
    for (std::size_t i = 0; i < n; ++i) b[i] += 0.3 * bn * U(i, 0);
    const auto x_ref = n <= 300 ? oracle::dense_pinv_apply(M, b) : oracle::pinv_solve_bordered(M, U, V, b);

    const auto t0 = Clock::now();
    const auto r  = pipit_solve(A, b);
    solve_time += seconds_since(t0);
    const double dn = std::abs(oracle::norm2(r.x_pi) / oracle::norm2(x_ref) - 1.0);
    const std::string tag = std::to_string(grid) + "^2";
    v.check(r.normal_res <= 1e-11, tag + " normal residual " + fmt("%.1e", r.normal_res));
    v.check(dn <= 1e-8, tag + " norm mismatch " + fmt("%.1e", dn));
    worst_nr   = std::max(worst_nr, r.normal_res);
    worst_norm = std::max(worst_norm, dn);
    g_null_ortho.add(to_oracle(r.lns_basis.V));
    g_null_ortho.add(to_oracle(r.rns_basis.V));
  }
  v.check(solve_time < 30.0, "runtime");
  v.note("grids 8..32: worst ||A^T r||/||A^T b|| " + fmt("%.1e", worst_nr) +
         ", worst | ||x||/||x_ref|| - 1 | " + fmt("%.1e", worst_norm) + ", " +
         fmt("%.1f s", solve_time));
  return v;
}

// ---------------------------------------------------------------- criterion 7

Verdict refinement_convergence() {
  Verdict           v;
  const std::size_t n = 15, r = 11;
  std::mt19937_64   rng(7);
  // A = X diag(D, 0) X^{-1}: index one, N(A) and R(A) complementary
  auto X = oracle::random_gaussian(n, n, rng);
  for (auto &x : X.a) x *= 0.15 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) X(i, i) += 1.0;
  const auto  Xi = oracle::inverse(X);
  oracle::Mat D(n, n), Dg(n, n);
  for (std::size_t i = 0; i < r; ++i) {
    D(i, i)  = 1.0 + static_cast<double>(i) / static_cast<double>(r);
    Dg(i, i) = 1.0 / D(i, i);
  }
  const auto M  = oracle::mul(oracle::mul(X, D), Xi);
  const auto Gs = oracle::mul(oracle::mul(X, Dg), Xi);  // group inverse, R(G) = R(A)
  const auto A  = oracle::to_sparse(M);

  const auto x_true = oracle::random_vector(n, rng);
  const auto b      = oracle::mul(M, x_true);
  const auto x_star = oracle::mul(oracle::mul(Gs, M), x_true);  // range component

  auto errors = [&](const oracle::Mat &G, std::size_t steps) {
    const DenseOperator  gop(G);
    const MatrixOperator aop(A);
    std::vector<double>  e{oracle::norm2(x_star)};
    for (std::size_t j = 1; j <= steps; ++j) {
      const auto res = hifir_refine(gop, aop, b, RefineParams{1e-300, 1e300, j});
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = res.x[i] - x_star[i];
      e.push_back(oracle::norm2(d));
    }
    return e;
  };

  // exact generalized inverse: x_1 is already the solution
  const auto exact = errors(Gs, 1);
  v.check(exact[1] <= 1e-12 * exact[0], "exact generalized inverse not solved in one step");

  // approximate inverse with the same range: G = G_s (I + E)
  auto E = oracle::random_gaussian(n, n, rng);
  for (auto &x : E.a) x *= 0.1 / std::sqrt(static_cast<double>(n));
  auto IE = E;
  for (std::size_t i = 0; i < n; ++i) IE(i, i) += 1.0;
  const auto G   = oracle::mul(Gs, IE);
  const auto err = errors(G, 5);
  double     worst = 0.0;
  for (std::size_t j = 1; j <= 5; ++j) {
    const double ratio = err[j] / err[j - 1];
    worst              = std::max(worst, ratio);
    v.check(ratio <= 0.5, "step " + std::to_string(j) + " ratio " + fmt("%.3f", ratio));
  }
  v.note("exact G: error " + fmt("%.1e", exact[1] / exact[0]) +
         " after one step; perturbed G: worst step ratio " + fmt("%.3f", worst) + " over 5 steps");
  return v;
}

// ---------------------------------------------------------------- criterion 8

Verdict qrcp_correctness() {
  Verdict                                    v;
  std::mt19937_64                            rng(8);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  std::size_t                                ok_rec = 0, ok_diag = 0;
  double                                     worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = dim(rng);
    const auto        S = k % 4 == 0 && n > 1 ? oracle::random_low_rank(n, n, n / 2, rng)
                                              : oracle::random_gaussian(n, n, rng);
    DenseMatrix       Sd(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) Sd(i, j) = S(i, j);
    const auto  f = qrcp(Sd);
    oracle::Mat SP(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) SP(i, j) = S(i, f.perm[j]);
    const double rec =
        oracle::fro(oracle::sub(SP, oracle::mul(to_oracle(f.Q()), to_oracle(f.R())))) / oracle::fro(S);
    bool mono = true;
    for (std::size_t i = 1; i < n; ++i)
      mono = mono && std::abs(f.r(i, i)) <= std::abs(f.r(i - 1, i - 1)) * (1 + 1e-12);
    ok_rec += rec <= 1e-12;
    ok_diag += mono;
    worst = std::max(worst, rec);
  }
  DenseMatrix T(2, 2);
  T(0, 0)          = 1.0;
  T(1, 1)          = 1e-12;
  const auto rank = estimate_rank(qrcp(T), 1e10);
  v.check(ok_rec == 100, "reconstruction " + std::to_string(ok_rec) + "/100");
  v.check(ok_diag == 100, "monotone diagonal " + std::to_string(ok_diag) + "/100");
  v.check(rank == 1, "estimate_rank(diag(1,1e-12)) = " + std::to_string(rank));
  v.note("worst ||SP-QR||/||S|| " + fmt("%.1e", worst) + ", rank of diag(1,1e-12) " +
         std::to_string(rank));
  return v;
}

// ---------------------------------------------------------------- criterion 9

Verdict orthogonality() {
  Verdict  v;
  OrthoLog arnoldi;
  for (const auto &A : {gen_neumann(32, 32), gen_advection_diffusion(32, 32, {1.0, 1.0})}) {
    const MatrixOperator op(A);
    const auto           F = HifFactorization::build(A);
    const auto           g = F.view(SchurMode::truncated);
    std::mt19937_64      rng(9);
    const auto           b = oracle::random_vector(A.rows(), rng);
    for (bool pre : {false, true}) {
      KspOptions o;
      o.ortho      = Ortho::householder;
      o.restart    = 30;
      o.maxit      = 30;
      o.rtol       = 1e-30;
      o.keep_state = true;
      const IdentityOperator I(A.rows());
      const auto rep = fgmres(op, fixed_preconditioner(pre ? static_cast<const LinearOperator &>(g) : I),
                              b, o);
      arnoldi.add(to_oracle(rep.state->Q));
    }
  }
  // null-space bases: the ones gathered by criteria 1 and 6, plus a wider one
  {
    std::mt19937_64 rng(10);
    const auto      M = oracle::random_low_rank(60, 60, 54, rng);
    const auto      A = oracle::to_sparse(M);
    const auto      F = HifFactorization::build(A, HifParams{IluParams::no_drop(), 1e10});
    g_null_ortho.add(to_oracle(compute_nullspace(A, F).V));
    g_null_ortho.add(to_oracle(lns(A, F).V));
  }
  v.check(arnoldi.worst_ratio <= 1.0, "Householder-Arnoldi basis");
  v.check(g_null_ortho.worst_ratio <= 1.0, "null-space bases");
  v.note("Arnoldi " + std::to_string(arnoldi.runs) + " bases at " +
         fmt("%.3f", arnoldi.worst_ratio) + " of bound, null spaces " +
         std::to_string(g_null_ortho.runs) + " bases at " + fmt("%.3f", g_null_ortho.worst_ratio) +
         " of bound");
  return v;
}

// --------------------------------------------------------------- criterion 10

#ifdef HIFIR_HAVE_CLI
std::string slurp(const std::filesystem::path &p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hifir");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
}
#endif

Verdict determinism() {
  Verdict v;
#ifdef HIFIR_HAVE_CLI
  namespace fs = std::filesystem;
  const fs::path dir(HIFIR_ACCEPT_TMP);
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto m = (dir / "advdiff24.mtx").string();
  v.check(cli({"gen", "--advdiff", "24", "24", "--out", m, "--report", (dir / "gen.json").string()}) == 0,
          "gen");
  // the grid operator is singular, so solve gets a right-hand side in its range
  const auto A = read_matrix_market(m);
  std::mt19937_64 rng(42);
  const auto      y = oracle::random_vector(A.rows(), rng);
  DenseVector     b(A.rows());
  spmv(A, y, b);
  const auto bp = (dir / "b.mtx").string();
  write_vector(b, bp);
  for (const char *mode : {"solve", "nullspace", "pinv"}) {
    std::string reports[2], outs[2];
    for (int k = 0; k < 2; ++k) {
      const auto rp   = (dir / (std::string(mode) + std::to_string(k) + ".json")).string();
      const auto op   = (dir / (std::string(mode) + std::to_string(k) + ".mtx")).string();
      const int  code = cli({mode, "--matrix", m, "--rhs", bp, "--seed", "42", "--out", op,
                             "--report", rp});
      v.check(code == 0, std::string(mode) + " exit " + std::to_string(code));
      auto rep = nlohmann::json::parse(slurp(rp));
      rep.erase("timing");
      reports[k] = rep.dump();
      outs[k]    = slurp(op);
    }
    v.check(reports[0] == reports[1], std::string(mode) + " report differs");
    v.check(outs[0] == outs[1] && !outs[0].empty(), std::string(mode) + " output differs");
  }
  v.note("solve, nullspace and pinv: reports and outputs byte-identical across two runs");
#else
  v.check(false, "built without the command-line front end");
#endif
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"null-space precision", null_space_precision},
      {"one-iteration optimality", one_iteration_optimality},
      {"generalized-inverse identity", generalized_inverse_identity},
      {"singular value bound", singular_value_bound},
      {"consistent-system solve", consistent_systems},
      {"PIPIT oracle equivalence", pipit_vs_oracle},
      {"iterative-refinement convergence", refinement_convergence},
      {"QRCP correctness", qrcp_correctness},
      {"orthogonality", orthogonality},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict    v;
    try {
      v = criteria[i].second();
    } catch (const std::exception &e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    failures += !v.pass;
    std::printf("%s %2zu %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
