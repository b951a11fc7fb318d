/// \file hifir/matrix_market.hpp
/// \brief Matrix Market reader and writer

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hifir/sparse.hpp"

namespace hifir {

class MatrixMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// \brief read a real coordinate file (general or symmetric)
///
/// Duplicates are summed and the strict lower triangle of symmetric files is
/// mirrored. Array, complex and pattern files are rejected.
SparseMatrix read_matrix_market(std::istream &in);
SparseMatrix read_matrix_market(const std::string &path);

/// \brief write in coordinate general format with round-trip precision
void write_matrix_market(const SparseMatrix &A, std::ostream &out);
void write_matrix_market(const SparseMatrix &A, const std::string &path);

/// \brief column-major dense block, used for vectors and null-space bases
struct DenseArray {
  std::size_t         rows = 0;
  std::size_t         cols = 0;
  std::vector<double> data;  ///< column-major, rows * cols
};

/// \brief read an "array real general" file
DenseArray read_dense_array(std::istream &in);
DenseArray read_dense_array(const std::string &path);

void write_dense_array(const DenseArray &X, std::ostream &out);
void write_dense_array(const DenseArray &X, const std::string &path);

/// \brief read a single vector from either array or coordinate format
DenseVector read_vector(const std::string &path);
void        write_vector(std::span<const double> x, const std::string &path);

}  // namespace hifir
