#pragma once

// Coordinate-format accumulation buffer and compressed-row matrix.

#include <filesystem>
#include <span>
#include <vector>

#include "femtet/types.hpp"

namespace femtet {

struct Triplets {
  std::vector<Index> rows;
  std::vector<Index> cols;
  std::vector<double> vals;

  void add(Index r, Index c, double v) {
    rows.push_back(r);
    cols.push_back(c);
    vals.push_back(v);
  }
  void reserve(std::size_t n) {
    rows.reserve(n);
    cols.reserve(n);
    vals.reserve(n);
  }
  std::size_t size() const { return vals.size(); }
  void append(const Triplets& other);
};

class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Empty n_rows x n_cols matrix.
  CsrMatrix(Index n_rows, Index n_cols);

  /// Sums duplicates. Entries with equal (row, col) are added in buffer
  /// order, so the result does not depend on how the buffer was produced as
  /// long as the buffer itself is the same.
  static CsrMatrix from_triplets(Index n_rows, Index n_cols, const Triplets& t);
  static CsrMatrix identity(Index n);

  Index n_rows() const { return n_rows_; }
  Index n_cols() const { return n_cols_; }
  std::size_t nnz() const { return vals_.size(); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return vals_; }
  std::span<double> values() { return vals_; }

  /// Entry (r, c), zero if not stored.
  double at(Index r, Index c) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  CsrMatrix transpose() const;
  CsrMatrix scaled(double s) const;
  std::vector<double> diagonal() const;

  double max_abs() const;
  /// max |A − Aᵀ| over all entries.
  double max_abs_asymmetry() const;
  double sum() const;

  /// Rows `rows` and columns `cols` (both sorted) as a new matrix.
  CsrMatrix submatrix(std::span<const Index> rows,
                      std::span<const Index> cols) const;

  /// Writes "row col value" lines, 1-based. IoError on failure.
  void write_coo(const std::filesystem::path& path) const;

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> vals_;
};

/// α A + β B with the union sparsity pattern. ShapeMismatch if sizes differ.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0,
              double beta = 1.0);

}  // namespace femtet
