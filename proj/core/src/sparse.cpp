#include "hifir/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hifir {

namespace {

/// s + c carries the sum with its rounding error (Neumaier)
inline void neumaier_add(double &s, double &c, double t) {
  const double u = s + t;
  c += std::abs(s) >= std::abs(t) ? (s - u) + t : (t - u) + s;
  s = u;
}

void require(bool cond, const char *msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_dim(std::size_t got, std::size_t want, const char *what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(want) + ", got " + std::to_string(got));
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices,
                           std::vector<double>      values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  require(row_offsets_.size() == n_rows_ + 1, "row_offsets must have n_rows+1 entries");
  require(row_offsets_.front() == 0, "row_offsets must start at zero");
  require(row_offsets_.back() == col_indices_.size(),
          "row_offsets must end at nnz");
  require(col_indices_.size() == values_.size(),
          "col_indices and values differ in length");
  for (std::size_t i = 0; i < n_rows_; ++i) {
    require(row_offsets_[i] <= row_offsets_[i + 1], "row_offsets must be nondecreasing");
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      require(col_indices_[p] < n_cols_, "column index out of range");
      require(p == row_offsets_[i] || col_indices_[p - 1] < col_indices_[p],
              "column indices must be strictly increasing within a row");
      require(std::isfinite(values_[p]), "matrix values must be finite");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> triplets) {
  for (const auto &t : triplets)
    require(t.row < n_rows && t.col < n_cols, "triplet index out of range");
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double>      vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  std::size_t last_row = n_rows;  // sentinel
  for (const auto &t : triplets) {
    if (t.row == last_row && !cols.empty() && cols.back() == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
    last_row = t.row;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1), cols(n);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_rows_ || j >= n_cols_) throw std::out_of_range("SparseMatrix::at");
  const auto idx = row_indices(i);
  const auto it  = std::lower_bound(idx.begin(), idx.end(), j);
  if (it == idx.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<std::size_t>(it - idx.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(n_cols_ + 1, 0);
  for (auto c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> cols(nnz());
  std::vector<double>      vals(nnz());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  // rows are visited in order, so each output row comes out sorted
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const auto q = next[col_indices_[p]]++;
      cols[q]      = i;
      vals[q]      = values_[p];
    }
  return SparseMatrix(n_cols_, n_rows_, std::move(offsets), std::move(cols), std::move(vals));
}

PermVec::PermVec(std::vector<std::size_t> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (auto v : image_) {
    require(v < image_.size() && !seen[v], "PermVec must be a bijection on [0, n)");
    seen[v] = 1;
  }
}

PermVec PermVec::identity(std::size_t n) {
  std::vector<std::size_t> img(n);
  std::iota(img.begin(), img.end(), std::size_t{0});
  return PermVec(std::move(img));
}

PermVec PermVec::inverse() const {
  std::vector<std::size_t> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
  return PermVec(std::move(inv));
}

void spmv(const SparseMatrix &A, std::span<const double> x, std::span<double> y) {
  check_dim(x.size(), A.cols(), "spmv input");
  check_dim(y.size(), A.rows(), "spmv output");
  const auto off  = A.row_offsets();
  const auto cols = A.col_indices();
  const auto vals = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) s += vals[p] * x[cols[p]];
    y[i] = s;
  }
}

DenseVector spmv(const SparseMatrix &A, std::span<const double> x) {
  DenseVector y(A.rows());
  spmv(A, x, y);
  return y;
}

void spmv_t(const SparseMatrix &A, std::span<const double> x, std::span<double> y) {
  check_dim(x.size(), A.rows(), "spmv_t input");
  check_dim(y.size(), A.cols(), "spmv_t output");
  std::fill(y.begin(), y.end(), 0.0);
  const auto off  = A.row_offsets();
  const auto cols = A.col_indices();
  const auto vals = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double xi = x[i];
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) y[cols[p]] += vals[p] * xi;
  }
}

DenseVector spmv_t(const SparseMatrix &A, std::span<const double> x) {
  DenseVector y(A.cols());
  spmv_t(A, x, y);
  return y;
}

double norm1(const SparseMatrix &A) {
  std::vector<double> colsum(A.cols(), 0.0);
  const auto cols = A.col_indices();
  const auto vals = A.values();
  for (std::size_t p = 0; p < A.nnz(); ++p) colsum[cols[p]] += std::abs(vals[p]);
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

double norm_inf(const SparseMatrix &A) {
  double r = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (double v : A.row_values(i)) s += std::abs(v);
    r = std::max(r, s);
  }
  return r;
}

double norm_fro(const SparseMatrix &A) { return vec_norm2(A.values()); }

double vec_norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double vec_norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double vec_norm2(std::span<const double> x) {
  // scaled by the largest entry, summed with compensation
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0 || !std::isfinite(m)) return m;
  const double inv = 1.0 / m;
  double       s = 0.0, c = 0.0;
  for (double v : x) {
    const double t = v * inv;
    neumaier_add(s, c, t * t);
  }
  return m * std::sqrt(s + c);
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_dim(y.size(), x.size(), "dot");
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) neumaier_add(s, c, x[i] * y[i]);
  return s + c;
}

SparseMatrix permute(const SparseMatrix &A, const PermVec &rows, const PermVec &cols) {
  check_dim(rows.size(), A.rows(), "permute rows");
  check_dim(cols.size(), A.cols(), "permute cols");
  const auto qinv = cols.inverse();
  std::vector<std::size_t> offsets(A.rows() + 1, 0);
  for (std::size_t i = 0; i < A.rows(); ++i) offsets[i + 1] = offsets[i] + A.row_nnz(rows[i]);
  std::vector<std::size_t>                       out_cols(A.nnz());
  std::vector<double>                            out_vals(A.nnz());
  std::vector<std::pair<std::size_t, double>>    buf;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto r   = rows[i];
    const auto idx = A.row_indices(r);
    const auto val = A.row_values(r);
    buf.clear();
    for (std::size_t k = 0; k < idx.size(); ++k) buf.emplace_back(qinv[idx[k]], val[k]);
    std::sort(buf.begin(), buf.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (std::size_t k = 0; k < buf.size(); ++k) {
      out_cols[offsets[i] + k] = buf[k].first;
      out_vals[offsets[i] + k] = buf[k].second;
    }
  }
  return SparseMatrix(A.rows(), A.cols(), std::move(offsets), std::move(out_cols),
                      std::move(out_vals));
}

SparseMatrix principal_block(const SparseMatrix &A, std::size_t first, std::size_t count) {
  require(first + count <= A.rows() && first + count <= A.cols(),
          "principal_block out of range");
  std::vector<std::size_t> offsets(count + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double>      vals;
  for (std::size_t i = 0; i < count; ++i) {
    const auto idx = A.row_indices(first + i);
    const auto val = A.row_values(first + i);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] >= first && idx[k] < first + count) {
        cols.push_back(idx[k] - first);
        vals.push_back(val[k]);
      }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(count, count, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace hifir
