// Binary layout (little-endian, as written by the host):
//   "HIFIRBIN" u32 version u64 n u32 mode u8 schur_illcond u64 n_levels
//   per level: L_B U_B L_E U_F as CSR blobs, D_B, perm_row, perm_col,
//              row_scale, col_scale, n_kept, n_static, n_dynamic
//   schur: n_s, qr (column-major n_s^2), tau, perm, rank_trunc, rank_full

#include <cstdint>
#include <cstring>
#include <fstream>

#include "hifir/hif.hpp"

namespace hifir {

namespace {

constexpr char          kMagic[8] = {'H', 'I', 'F', 'I', 'R', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion  = 1;

class Writer {
 public:
  explicit Writer(std::ostream &out) : out_(out) {}
  template <class T>
  void pod(T v) {
    out_.write(reinterpret_cast<const char *>(&v), sizeof v);
  }
  void u64(std::size_t v) { pod<std::uint64_t>(v); }
  void reals(std::span<const double> v) {
    u64(v.size());
    out_.write(reinterpret_cast<const char *>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  void indices(std::span<const std::size_t> v) {
    u64(v.size());
    for (auto x : v) u64(x);
  }
  void csr(const SparseMatrix &A) {
    u64(A.rows());
    u64(A.cols());
    indices(A.row_offsets());
    indices(A.col_indices());
    reals(A.values());
  }

 private:
  std::ostream &out_;
};

class Reader {
 public:
  explicit Reader(std::istream &in) : in_(in) {}
  template <class T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char *>(&v), sizeof v);
    if (!in_) throw FactorFileError("truncated factorization file");
    return v;
  }
  std::size_t u64() {
    const auto v = pod<std::uint64_t>();
    if (v > (std::uint64_t{1} << 48)) throw FactorFileError("corrupt factorization file");
    return static_cast<std::size_t>(v);
  }
  std::vector<double> reals() {
    std::vector<double> v(u64());
    in_.read(reinterpret_cast<char *>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in_) throw FactorFileError("truncated factorization file");
    return v;
  }
  std::vector<std::size_t> indices() {
    std::vector<std::size_t> v(u64());
    for (auto &x : v) x = u64();
    return v;
  }
  SparseMatrix csr() {
    const auto r = u64(), c = u64();
    auto       off = indices();
    auto       col = indices();
    auto       val = reals();
    return SparseMatrix(r, c, std::move(off), std::move(col), std::move(val));
  }

 private:
  std::istream &in_;
};

}  // namespace

void HifFactorization::save(std::ostream &out) const {
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.pod(kVersion);
  w.u64(n_);
  w.pod<std::uint32_t>(mode_ == SchurMode::truncated ? 0 : 1);
  w.pod<std::uint8_t>(schur_illcond_ ? 1 : 0);
  w.u64(levels_.size());
  for (const auto &l : levels_) {
    w.csr(l.L_B);
    w.csr(l.U_B);
    w.csr(l.L_E);
    w.csr(l.U_F);
    w.reals(l.D_B);
    w.indices(l.perm_row.image());
    w.indices(l.perm_col.image());
    w.reals(l.scaling.row_scale);
    w.reals(l.scaling.col_scale);
    w.u64(l.n_kept);
    w.u64(l.n_static_deferred);
    w.u64(l.n_dynamic_deferred);
  }
  w.u64(schur_.size());
  w.reals(schur_.qr.data());
  w.reals(schur_.tau);
  w.indices(schur_.perm.image());
  w.u64(schur_.rank_trunc);
  w.u64(schur_.rank_full);
  if (!out) throw FactorFileError("failed to write factorization");
}

void HifFactorization::save(const std::string &path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FactorFileError("cannot open " + path + " for writing");
  save(f);
}

HifFactorization HifFactorization::load(std::istream &in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw FactorFileError("not a factorization file");
  Reader r(in);
  if (r.pod<std::uint32_t>() != kVersion)
    throw FactorFileError("unsupported factorization file version");
  HifFactorization f;
  f.n_             = r.u64();
  f.mode_          = r.pod<std::uint32_t>() == 0 ? SchurMode::truncated : SchurMode::untruncated;
  f.schur_illcond_ = r.pod<std::uint8_t>() != 0;
  const auto nl    = r.u64();
  std::size_t expected = f.n_;
  for (std::size_t k = 0; k < nl; ++k) {
    LevelFactor l;
    l.L_B                = r.csr();
    l.U_B                = r.csr();
    l.L_E                = r.csr();
    l.U_F                = r.csr();
    l.D_B                = r.reals();
    l.perm_row           = PermVec(r.indices());
    l.perm_col           = PermVec(r.indices());
    l.scaling.row_scale  = r.reals();
    l.scaling.col_scale  = r.reals();
    l.n_kept             = r.u64();
    l.n_static_deferred  = r.u64();
    l.n_dynamic_deferred = r.u64();
    const auto n = l.size(), nk = l.n_kept;
    if (n != expected || nk > n || l.D_B.size() != nk || l.perm_col.size() != n ||
        l.scaling.row_scale.size() != n || l.scaling.col_scale.size() != n ||
        l.L_B.rows() != nk || l.L_B.cols() != nk || l.U_B.rows() != nk ||
        l.U_B.cols() != nk || l.L_E.rows() != n - nk || l.L_E.cols() != nk ||
        l.U_F.rows() != nk || l.U_F.cols() != n - nk)
      throw FactorFileError("inconsistent level in factorization file");
    expected = n - nk;
    f.levels_.push_back(std::move(l));
  }
  const auto ns = r.u64();
  if (ns != expected) throw FactorFileError("inconsistent Schur size in factorization file");
  auto data = r.reals();
  if (data.size() != ns * ns) throw FactorFileError("corrupt Schur factor");
  f.schur_.qr = DenseMatrix(ns, ns);
  std::copy(data.begin(), data.end(), f.schur_.qr.data().begin());
  f.schur_.tau        = r.reals();
  f.schur_.perm       = PermVec(r.indices());
  f.schur_.rank_trunc = r.u64();
  f.schur_.rank_full  = r.u64();
  if (f.schur_.tau.size() != ns || f.schur_.perm.size() != ns || f.schur_.rank_full > ns ||
      f.schur_.rank_trunc > f.schur_.rank_full)
    throw FactorFileError("corrupt Schur factor");
  return f;
}

HifFactorization HifFactorization::load(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FactorFileError("cannot open " + path);
  return load(f);
}

}  // namespace hifir
