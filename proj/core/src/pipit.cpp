#include "hifir/pipit.hpp"

namespace hifir {

NullSpaceBasis basis_from_vectors(const std::vector<DenseVector> &vs) {
  NullSpaceBasis out;
  if (vs.empty()) return out;
  const std::size_t n = vs.front().size();
  out.qr_store        = HouseholderBasis(n);
  std::vector<DenseVector> cols;
  for (const auto &v : vs) {
    if (v.size() != n) throw DimensionError("basis_from_vectors: lengths differ");
    if (!out.qr_store.append(v)) continue;
    cols.push_back(out.qr_store.column(cols.size()));
    out.residuals_1norm.push_back(0.0);
  }
  out.V = DenseMatrix(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    std::copy(cols[j].begin(), cols[j].end(), out.V.col(j).begin());
  return out;
}

PipitResult pipit_solve(const SparseMatrix &A, const HifFactorization &G,
                        std::span<const double> b, const NullSpaceBasis *known_rns,
                        const PipitOptions &opts) {
  const std::size_t n = A.rows();
  if (A.cols() != n || b.size() != n || G.size() != n)
    throw DimensionError("pipit_solve: dimensions differ");
  if (known_rns && known_rns->size() && known_rns->V.rows() != n)
    throw DimensionError("pipit_solve: known null space has the wrong length");

  NullSpaceOptions nopt = opts.null;
  nopt.max_dim          = opts.max_null_dim;

  PipitResult res;
  res.lns_basis = lns(A, G, nopt);
  if (res.lns_basis.size() >= opts.max_null_dim)
    throw PipitError("null space too large: left null space reached max_null_dim");

  DenseVector bhat(b.begin(), b.end());
  res.lns_basis.project_out(bhat);

  const MatrixOperator op(A);
  const auto           trunc = G.view(SchurMode::truncated);
  res.ls_report              = gmres(op, trunc, bhat, opts.ksp);
  if (!res.ls_report.converged() && opts.allow_fallback) {
    KspOptions k = opts.ksp;
    k.x0         = res.ls_report.x;
    auto retry   = fgmres(op, hifir_preconditioner(trunc, op, opts.null.hifir), bhat, k);
    retry.matvecs += res.ls_report.matvecs;
    retry.iters += res.ls_report.iters;
    retry.fallback = true;
    res.ls_report  = std::move(retry);
  }
  if (!res.ls_report.converged())
    throw PipitError("least-squares step did not converge (exit " +
                         to_string(res.ls_report.exit) + ")",
                     res.ls_report);
  res.x_ls = res.ls_report.x;

  if (known_rns) {
    res.rns_basis    = *known_rns;
    res.rns_supplied = true;
  } else {
    res.rns_basis = compute_nullspace(A, G, nopt);
    if (res.rns_basis.size() >= opts.max_null_dim)
      throw PipitError("null space too large: right null space reached max_null_dim");
  }
  res.x_pi = res.x_ls;
  res.rns_basis.project_out(res.x_pi);

  DenseVector r = spmv(A, res.x_pi);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double num = vec_norm2(spmv_t(A, r));
  const double den = vec_norm2(spmv_t(A, b));
  res.normal_res   = den > 0.0 ? num / den : num;
  return res;
}

PipitResult pipit_solve(const SparseMatrix &A, std::span<const double> b,
                        const NullSpaceBasis *known_rns, const PipitOptions &opts) {
  const auto G = HifFactorization::build(A, opts.hif);
  return pipit_solve(A, G, b, known_rns, opts);
}

}  // namespace hifir
