#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <hifir/hifir.hpp>

namespace hifir::cli {

namespace {

using json  = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char *command_name(Command c) {
  switch (c) {
    case Command::gen: return "gen";
    case Command::factor: return "factor";
    case Command::solve: return "solve";
    case Command::nullspace: return "nullspace";
    case Command::pinv: return "pinv";
  }
  return "?";
}

const char *rhs_name(RhsMode m) {
  switch (m) {
    case RhsMode::file: return "file";
    case RhsMode::row_sums: return "row_sums";
    case RhsMode::random_seeded: return "random";
  }
  return "?";
}

json config_json(const RunConfig &c) {
  json j;
  j["matrix"] = c.matrix_path;
  j["rhs"]    = c.rhs_mode == RhsMode::file ? c.rhs_path : rhs_name(c.rhs_mode);
  if (!c.factor_path.empty()) j["factor"] = c.factor_path;
  j["alpha"]    = std::isfinite(c.alpha) ? json(c.alpha) : json("inf");
  j["droptol"]  = c.sigma;
  j["tau"]      = std::isfinite(c.tau) ? json(c.tau) : json("inf");
  j["restart"]  = c.restart;
  j["rtol"]     = c.rtol;
  j["maxit"]    = c.maxit;
  j["tol_null"] = c.tol_null;
  j["seed"]     = c.seed;
  return j;
}

json history_json(const SolveReport &r) {
  json h = json::array();
  for (const auto &e : r.history)
    h.push_back({{"iter", e.iter},
                 {"matvecs", e.matvecs},
                 {"rel_res", e.rel_res},
                 {"kappa_H", std::isfinite(e.kappa_H) ? json(e.kappa_H) : json("inf")}});
  return h;
}

HifParams hif_params(const RunConfig &c) {
  HifParams p;
  p.ilu.alpha   = c.alpha;
  p.ilu.droptol = c.sigma;
  p.ilu.tau     = c.tau;
  return p;
}

SparseMatrix load_matrix(const RunConfig &c) {
  if (c.matrix_path.empty()) throw InputError("--matrix is required");
  try {
    return read_matrix_market(c.matrix_path);
  } catch (const MatrixMarketError &e) {
    throw InputError(e.what());
  } catch (const std::invalid_argument &e) {
    throw InputError(std::string("invalid matrix: ") + e.what());
  }
}

DenseVector make_rhs(const RunConfig &c, const SparseMatrix &A) {
  const std::size_t n = A.rows();
  switch (c.rhs_mode) {
    case RhsMode::row_sums: return spmv(A, DenseVector(n, 1.0));
    case RhsMode::random_seeded: {
      std::mt19937_64                  rng(c.seed);
      std::normal_distribution<double> g;
      DenseVector                      b(n);
      for (auto &v : b) v = g(rng);
      return b;
    }
    case RhsMode::file: break;
  }
  DenseVector b;
  try {
    b = read_vector(c.rhs_path);
  } catch (const MatrixMarketError &e) {
    throw InputError(e.what());
  }
  if (b.size() != n) throw InputError("right-hand side length does not match the matrix");
  return b;
}

HifFactorization obtain_factor(const RunConfig &c, const SparseMatrix &A) {
  if (c.factor_path.empty()) return HifFactorization::build(A, hif_params(c));
  HifFactorization G;
  try {
    G = HifFactorization::load(c.factor_path);
  } catch (const FactorFileError &e) {
    throw InputError(e.what());
  }
  if (G.size() != A.rows()) throw InputError("factorization size does not match the matrix");
  return G;
}

json factor_summary(const SparseMatrix &A, const HifFactorization &G) {
  json s;
  s["n"]          = A.rows();
  s["nnz"]        = A.nnz();
  s["levels"]     = G.n_levels();
  s["n_s"]        = G.schur_size();
  s["rank_trunc"] = G.schur().rank_trunc;
  s["nnz_factor"] = G.nnz();
  return s;
}

void write_report(const RunConfig &c, const json &report, std::ostream &out) {
  const std::string text = report.dump(2) + "\n";
  if (c.report_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.report_path);
  if (!f) throw InputError("cannot open " + c.report_path + " for writing");
  f << text;
}

void write_history(const RunConfig &c, const SolveReport &r) {
  if (c.history_path.empty()) return;
  std::ofstream f(c.history_path);
  if (!f) throw InputError("cannot open " + c.history_path + " for writing");
  f << history_json_lines(r);
}

void write_solution(const RunConfig &c, std::span<const double> x) {
  if (c.out_path.empty()) return;
  try {
    write_vector(x, c.out_path);
  } catch (const MatrixMarketError &e) {
    throw InputError(e.what());
  }
}

int exit_code(const SolveReport &r) { return r.converged() ? 0 : 2; }

int run_gen(const RunConfig &c, json &report) {
  SparseMatrix A;
  if (c.gen == Generator::neumann) {
    A = gen_neumann(c.grid[0], c.grid[1]);
  } else if (c.gen == Generator::advdiff) {
    A = gen_advection_diffusion(c.grid[0], c.grid[1], c.velocity);
  } else {
    throw InputError("gen needs --neumann NX NY or --advdiff NX NY");
  }
  if (c.out_path.empty()) throw InputError("gen needs --out");
  try {
    write_matrix_market(A, c.out_path);
  } catch (const MatrixMarketError &e) {
    throw InputError(e.what());
  }
  json s;
  s["n"]          = A.rows();
  s["nnz"]        = A.nnz();
  s["levels"]     = 0;
  s["n_s"]        = 0;
  s["rank_trunc"] = 0;
  s["iterations"] = 0;
  s["matvecs"]    = 0;
  s["rel_res"]    = nullptr;
  report["summary"] = s;
  return 0;
}

int run_factor(const RunConfig &c, json &report, json &timing) {
  const auto A  = load_matrix(c);
  const auto t0 = Clock::now();
  const auto G  = HifFactorization::build(A, hif_params(c));
  timing["factor"] = seconds_since(t0);
  if (!c.out_path.empty()) {
    try {
      G.save(c.out_path);
    } catch (const FactorFileError &e) {
      throw InputError(e.what());
    }
  }
  json s          = factor_summary(A, G);
  s["iterations"] = 0;
  s["matvecs"]    = 0;
  s["rel_res"]    = nullptr;
  report["summary"] = s;
  return 0;
}

int run_solve(const RunConfig &c, json &report, json &timing) {
  const auto A = load_matrix(c);
  if (A.rows() != A.cols()) throw InputError("the matrix must be square");
  const auto b  = make_rhs(c, A);
  auto       t0 = Clock::now();
  const auto G  = obtain_factor(c, A);
  timing["factor"] = seconds_since(t0);

  KspOptions o;
  o.restart = c.restart;
  o.rtol    = c.rtol;
  o.maxit   = c.maxit;
  t0        = Clock::now();
  const auto rep = gmres(MatrixOperator(A), G.view(SchurMode::truncated), b, o);
  timing["solve"] = seconds_since(t0);

  json s          = factor_summary(A, G);
  s["iterations"] = rep.iters;
  s["matvecs"]    = rep.matvecs;
  s["rel_res"]    = rep.rel_res;
  s["exit"]       = to_string(rep.exit);
  s["converged"]  = rep.converged();
  report["summary"] = s;
  report["history"] = history_json(rep);
  write_history(c, rep);
  write_solution(c, rep.x);
  return exit_code(rep);
}

int run_nullspace(const RunConfig &c, json &report, json &timing) {
  const auto A = load_matrix(c);
  if (A.rows() != A.cols()) throw InputError("the matrix must be square");
  auto       t0 = Clock::now();
  const auto G  = obtain_factor(c, A);
  timing["factor"] = seconds_since(t0);

  NullSpaceOptions o;
  o.tol_null    = c.tol_null;
  o.seed        = c.seed;
  o.ksp.restart = c.restart;
  o.ksp.maxit   = c.maxit;
  t0            = Clock::now();
  const auto N  = c.left ? lns(A, G, o) : compute_nullspace(A, G, o);
  timing["solve"] = seconds_since(t0);

  // 2-norm residuals relative to a power-iteration estimate of ||A||_2
  json r2 = json::array();
  {
    DenseVector x(A.cols());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
    double a2 = 0.0;
    for (int k = 0; k < 200; ++k) {
      const auto   z  = spmv_t(A, spmv(A, x));
      const double zn = vec_norm2(z);
      if (zn == 0.0) break;
      const double next = std::sqrt(zn / vec_norm2(x));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / zn;
      if (std::abs(next - a2) <= 1e-12 * next) {
        a2 = next;
        break;
      }
      a2 = next;
    }
    for (std::size_t j = 0; j < N.size(); ++j) {
      const auto v  = N.column(j);
      const auto av = c.left ? spmv_t(A, v) : spmv(A, v);
      r2.push_back(a2 > 0.0 ? vec_norm2(av) / a2 : 0.0);
    }
  }

  json s               = factor_summary(A, G);
  s["side"]            = c.left ? "left" : "right";
  s["dim"]             = N.size();
  s["residuals_1norm"] = N.residuals_1norm;
  s["residuals_2norm"] = r2;
  s["iterations"]      = N.fgmres_iterations;
  s["matvecs"]         = N.matvecs;
  s["rel_res"]         = N.residuals_1norm.empty() ? json(nullptr)
                                                   : json(*std::max_element(
                                                         N.residuals_1norm.begin(),
                                                         N.residuals_1norm.end()));
  report["summary"] = s;

  if (!c.out_path.empty()) {
    DenseArray X{A.rows(), N.size(), {}};
    X.data.assign(N.V.data().begin(), N.V.data().end());
    try {
      write_dense_array(X, c.out_path);
    } catch (const MatrixMarketError &e) {
      throw InputError(e.what());
    }
  }
  return 0;
}

int run_pinv(const RunConfig &c, json &report, json &timing) {
  const auto A = load_matrix(c);
  if (A.rows() != A.cols()) throw InputError("the matrix must be square");
  const auto b  = make_rhs(c, A);
  auto       t0 = Clock::now();
  const auto G  = obtain_factor(c, A);
  timing["factor"] = seconds_since(t0);

  PipitOptions o;
  o.hif          = hif_params(c);
  o.null.tol_null = c.tol_null;
  o.null.seed    = c.seed;
  o.ksp.restart  = c.restart;
  o.ksp.rtol     = c.rtol;
  o.ksp.maxit    = c.maxit;
  std::optional<NullSpaceBasis> known;
  if (c.constant_rns) known = basis_from_vectors({DenseVector(A.rows(), 1.0)});

  json s = factor_summary(A, G);
  t0     = Clock::now();
  try {
    const auto res  = pipit_solve(A, G, b, known ? &*known : nullptr, o);
    timing["solve"] = seconds_since(t0);
    s["iterations"] = res.ls_report.iters;
    s["matvecs"]    = res.ls_report.matvecs + res.lns_basis.matvecs + res.rns_basis.matvecs;
    s["rel_res"]    = res.ls_report.rel_res;
    s["normal_res"] = res.normal_res;
    s["lns_dim"]    = res.lns_basis.size();
    s["rns_dim"]    = res.rns_basis.size();
    s["rns_supplied"] = res.rns_supplied;
    s["fallback"]   = res.ls_report.fallback;
    s["exit"]       = to_string(res.ls_report.exit);
    report["summary"] = s;
    report["history"] = history_json(res.ls_report);
    write_history(c, res.ls_report);
    write_solution(c, res.x_pi);
    return 0;
  } catch (const PipitError &e) {
    timing["solve"] = seconds_since(t0);
    s["error"]      = e.what();
    if (e.partial()) {
      s["iterations"]   = e.partial()->iters;
      s["matvecs"]      = e.partial()->matvecs;
      s["rel_res"]      = e.partial()->rel_res;
      s["exit"]         = to_string(e.partial()->exit);
      report["history"] = history_json(*e.partial());
      write_history(c, *e.partial());
    } else {
      s["iterations"] = 0;
      s["matvecs"]    = 0;
      s["rel_res"]    = nullptr;
    }
    report["summary"] = s;
    return 2;
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha >= 1.0)) throw InputError("--alpha must be >= 1");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw InputError("--droptol must lie in [0, 1)");
  if (!(tau > 1.0)) throw InputError("--tau must exceed 1");
  if (restart == 0) throw InputError("--restart must be positive");
  if (!(rtol > 0.0)) throw InputError("--rtol must be positive");
  if (!(tol_null > 0.0)) throw InputError("--tol-null must be positive");
  if (command == Command::gen) {
    if (gen == Generator::none) throw InputError("gen needs --neumann NX NY or --advdiff NX NY");
    if (grid[0] == 0 || grid[1] == 0) throw InputError("grid sizes must be positive");
    if (gen == Generator::advdiff && (grid[0] < 2 || grid[1] < 2))
      throw InputError("--advdiff needs grids of at least 2 x 2");
  } else if (matrix_path.empty()) {
    throw InputError("--matrix is required");
  }
  if (rhs_mode == RhsMode::file && rhs_path.empty()) throw InputError("--rhs path is empty");
}

std::optional<RunConfig> parse_args(int argc, const char *const *argv, std::ostream &help_out) {
  RunConfig   c;
  CLI::App    app{"Hybrid incomplete factorization solvers for singular systems", "hifir"};
  std::string command, mode, rhs;
  std::vector<std::size_t> neumann, advdiff;
  std::vector<double>      velocity;

  app.add_option("command", command, "gen | factor | solve | nullspace | pinv")
      ->check(CLI::IsMember({"gen", "factor", "solve", "nullspace", "pinv"}));
  app.add_option("--mode", mode, "alternative to the positional command")
      ->check(CLI::IsMember({"gen", "factor", "solve", "nullspace", "pinv"}));
  app.add_option("--matrix", c.matrix_path, "Matrix Market coordinate file");
  app.add_option("--rhs", rhs, "PATH | row_sums | random");
  app.add_option("--factor", c.factor_path, "saved factorization to reuse");
  app.add_option("--alpha", c.alpha, "fill ratio");
  app.add_option("--droptol", c.sigma, "drop tolerance");
  app.add_option("--tau", c.tau, "bound on factor condition estimates");
  app.add_option("--restart", c.restart, "GMRES restart length");
  app.add_option("--rtol", c.rtol, "relative residual tolerance");
  app.add_option("--maxit", c.maxit, "iteration limit");
  app.add_option("--tol-null", c.tol_null, "null-space acceptance threshold");
  app.add_option("--seed", c.seed, "random seed");
  auto *l = app.add_flag("--lns", c.left, "left null space");
  app.add_flag("--rns", "right null space (default)")->excludes(l);
  app.add_flag("--constant-rns", c.constant_rns, "pinv: take N(A) = span{1}");
  app.add_option("--neumann", neumann, "gen: Neumann Poisson grid NX NY")->expected(2);
  app.add_option("--advdiff", advdiff, "gen: advection-diffusion grid NX NY")->expected(2);
  app.add_option("--velocity", velocity, "gen: advection velocity VX VY")->expected(2);
  app.add_option("--out", c.out_path, "output matrix, vector, basis or factorization");
  app.add_option("--report", c.report_path, "JSON report (stdout when omitted)");
  app.add_option("--history", c.history_path, "convergence history as JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError &e) {
    throw InputError(e.what());
  }

  const std::string cmd = !command.empty() ? command : (!mode.empty() ? mode : "solve");
  if (!command.empty() && !mode.empty() && command != mode)
    throw InputError("positional command and --mode disagree");
  if (cmd == "gen") c.command = Command::gen;
  else if (cmd == "factor") c.command = Command::factor;
  else if (cmd == "solve") c.command = Command::solve;
  else if (cmd == "nullspace") c.command = Command::nullspace;
  else c.command = Command::pinv;

  if (rhs.empty() || rhs == "row_sums") c.rhs_mode = RhsMode::row_sums;
  else if (rhs == "random") c.rhs_mode = RhsMode::random_seeded;
  else {
    c.rhs_mode = RhsMode::file;
    c.rhs_path = rhs;
  }
  if (!neumann.empty() && !advdiff.empty()) throw InputError("choose one of --neumann and --advdiff");
  if (!neumann.empty()) {
    c.gen  = Generator::neumann;
    c.grid = {neumann[0], neumann[1]};
  }
  if (!advdiff.empty()) {
    c.gen  = Generator::advdiff;
    c.grid = {advdiff[0], advdiff[1]};
  }
  if (!velocity.empty()) c.velocity = {velocity[0], velocity[1]};
  c.validate();
  return c;
}

int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const auto t0 = Clock::now();
  json       report;
  report["schema"]  = 1;
  report["command"] = command_name(cfg.command);
  report["config"]  = config_json(cfg);
  json timing       = json::object();
  int  code         = 0;
  try {
    cfg.validate();
    switch (cfg.command) {
      case Command::gen: code = run_gen(cfg, report); break;
      case Command::factor: code = run_factor(cfg, report, timing); break;
      case Command::solve: code = run_solve(cfg, report, timing); break;
      case Command::nullspace: code = run_nullspace(cfg, report, timing); break;
      case Command::pinv: code = run_pinv(cfg, report, timing); break;
    }
    timing["wall_time"] = seconds_since(t0);
    report["timing"]    = timing;
    write_report(cfg, report, out);
  } catch (const InputError &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}

int main_entry(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(argc, argv, out);
  } catch (const InputError &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (!cfg) return 0;
  return run(*cfg, out, err);
}

}  // namespace hifir::cli
