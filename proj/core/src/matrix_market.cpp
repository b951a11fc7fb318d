#include "hifir/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hifir {

namespace {

struct Header {
  std::string format;    // coordinate | array
  std::string field;     // real | integer | complex | pattern
  std::string symmetry;  // general | symmetric | ...
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Header read_header(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixMarketError("empty Matrix Market stream");
  std::istringstream ss(line);
  std::string banner, object;
  Header      h;
  ss >> banner >> object >> h.format >> h.field >> h.symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || h.symmetry.empty())
    throw MatrixMarketError("malformed Matrix Market header: " + line);
  h.format   = lower(h.format);
  h.field    = lower(h.field);
  h.symmetry = lower(h.symmetry);
  return h;
}

/// next non-comment, non-blank line
bool next_data_line(std::istream &in, std::string &line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    return true;
  }
  return false;
}

void require_real(const Header &h) {
  if (h.field != "real" && h.field != "integer" && h.field != "double")
    throw MatrixMarketError("unsupported field '" + h.field + "', only real data is accepted");
}

std::ifstream open_in(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw MatrixMarketError("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream f(path);
  if (!f) throw MatrixMarketError("cannot open " + path + " for writing");
  return f;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream &in) {
  const auto h = read_header(in);
  if (h.format != "coordinate")
    throw MatrixMarketError("only coordinate format is accepted for sparse matrices");
  require_real(h);
  const bool sym = h.symmetry == "symmetric";
  if (!sym && h.symmetry != "general")
    throw MatrixMarketError("unsupported symmetry '" + h.symmetry + "'");

  std::string line;
  if (!next_data_line(in, line)) throw MatrixMarketError("missing size line");
  std::size_t m = 0, n = 0, nz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> m >> n >> nz)) throw MatrixMarketError("malformed size line: " + line);
  }
  std::vector<Triplet> trips;
  trips.reserve(sym ? 2 * nz : nz);
  for (std::size_t k = 0; k < nz; ++k) {
    if (!next_data_line(in, line)) throw MatrixMarketError("unexpected end of entries");
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double    v = 0.0;
    if (!(ss >> i >> j >> v)) throw MatrixMarketError("malformed entry: " + line);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > m || static_cast<std::size_t>(j) > n)
      throw MatrixMarketError("entry index out of range: " + line);
    if (!std::isfinite(v)) throw MatrixMarketError("non-finite entry: " + line);
    const auto r = static_cast<std::size_t>(i - 1), c = static_cast<std::size_t>(j - 1);
    trips.push_back({r, c, v});
    if (sym && r != c) trips.push_back({c, r, v});
  }
  return SparseMatrix::from_triplets(m, n, std::move(trips));
}

SparseMatrix read_matrix_market(const std::string &path) {
  auto f = open_in(path);
  return read_matrix_market(f);
}

void write_matrix_market(const SparseMatrix &A, std::ostream &out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto idx = A.row_indices(i);
    const auto val = A.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k)
      out << i + 1 << ' ' << idx[k] + 1 << ' ' << fmt(val[k]) << '\n';
  }
  if (!out) throw MatrixMarketError("write failure");
}

void write_matrix_market(const SparseMatrix &A, const std::string &path) {
  auto f = open_out(path);
  write_matrix_market(A, f);
}

DenseArray read_dense_array(std::istream &in) {
  const auto h = read_header(in);
  if (h.format != "array") throw MatrixMarketError("expected array format");
  require_real(h);
  if (h.symmetry != "general") throw MatrixMarketError("only general arrays are accepted");
  std::string line;
  if (!next_data_line(in, line)) throw MatrixMarketError("missing size line");
  DenseArray X;
  {
    std::istringstream ss(line);
    if (!(ss >> X.rows >> X.cols)) throw MatrixMarketError("malformed size line: " + line);
  }
  X.data.resize(X.rows * X.cols);
  for (auto &v : X.data) {
    if (!next_data_line(in, line)) throw MatrixMarketError("unexpected end of entries");
    std::istringstream ss(line);
    if (!(ss >> v) || !std::isfinite(v)) throw MatrixMarketError("malformed entry: " + line);
  }
  return X;
}

DenseArray read_dense_array(const std::string &path) {
  auto f = open_in(path);
  return read_dense_array(f);
}

void write_dense_array(const DenseArray &X, std::ostream &out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << X.rows << ' ' << X.cols << '\n';
  for (double v : X.data) out << fmt(v) << '\n';
  if (!out) throw MatrixMarketError("write failure");
}

void write_dense_array(const DenseArray &X, const std::string &path) {
  auto f = open_out(path);
  write_dense_array(X, f);
}

DenseVector read_vector(const std::string &path) {
  std::string banner;
  {
    auto f = open_in(path);
    std::getline(f, banner);
  }
  if (lower(banner).find("coordinate") != std::string::npos) {
    const auto A = read_matrix_market(path);
    if (A.cols() != 1) throw MatrixMarketError("vector file must have one column");
    DenseVector x(A.rows(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i)
      if (A.row_nnz(i)) x[i] = A.row_values(i)[0];
    return x;
  }
  auto X = read_dense_array(path);
  if (X.cols != 1) throw MatrixMarketError("vector file must have one column");
  return std::move(X.data);
}

void write_vector(std::span<const double> x, const std::string &path) {
  write_dense_array({x.size(), 1, DenseVector(x.begin(), x.end())}, path);
}

}  // namespace hifir
