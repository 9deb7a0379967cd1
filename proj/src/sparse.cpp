#include "femtet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "femtet/error.hpp"

namespace femtet {

void Triplets::append(const Triplets& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  cols.insert(cols.end(), other.cols.begin(), other.cols.end());
  vals.insert(vals.end(), other.vals.begin(), other.vals.end());
}

CsrMatrix::CsrMatrix(Index n_rows, Index n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(n_rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(Index n_rows, Index n_cols,
                                   const Triplets& t) {
  const std::size_t n = t.size();
  if (t.rows.size() != n || t.cols.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "triplet arrays differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (t.rows[i] < 0 || t.rows[i] >= n_rows || t.cols[i] < 0 ||
        t.cols[i] >= n_cols) {
      throw Error(ErrorKind::ShapeMismatch,
                  "triplet (" + std::to_string(t.rows[i] + 1) + ", " +
                      std::to_string(t.cols[i] + 1) + ") outside " +
                      std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
  }

  // Stable bucket by row.
  std::vector<std::size_t> start(n_rows + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++start[t.rows[i] + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::size_t> order(n);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) order[fill[t.rows[i]]++] = i;
  }

  CsrMatrix a(n_rows, n_cols);
  a.col_idx_.reserve(n);
  a.vals_.reserve(n);
  for (Index r = 0; r < n_rows; ++r) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(start[r]);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(start[r + 1]);
    std::stable_sort(first, last, [&](std::size_t x, std::size_t y) {
      return t.cols[x] < t.cols[y];
    });
    for (auto it = first; it != last;) {
      const Index c = t.cols[*it];
      double v = 0.0;
      for (; it != last && t.cols[*it] == c; ++it) v += t.vals[*it];
      a.col_idx_.push_back(c);
      a.vals_.push_back(v);
    }
    a.row_ptr_[r + 1] = static_cast<Index>(a.vals_.size());
  }
  return a;
}

CsrMatrix CsrMatrix::identity(Index n) {
  CsrMatrix a(n, n);
  a.col_idx_.resize(n);
  a.vals_.assign(n, 1.0);
  for (Index i = 0; i < n; ++i) {
    a.col_idx_[i] = i;
    a.row_ptr_[i + 1] = i + 1;
  }
  return a;
}

double CsrMatrix::at(Index r, Index c) const {
  auto first = col_idx_.begin() + row_ptr_[r];
  auto last = col_idx_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return vals_[it - col_idx_.begin()];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (Index r = 0; r < n_rows_; ++r) {
    double s = 0.0;
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      s += vals_[p] * x[col_idx_[p]];
    }
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_rows_);
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t(n_cols_, n_rows_);
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  std::partial_sum(t.row_ptr_.begin(), t.row_ptr_.end(), t.row_ptr_.begin());
  t.col_idx_.resize(nnz());
  t.vals_.resize(nnz());
  std::vector<Index> fill(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (Index r = 0; r < n_rows_; ++r) {
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const Index q = fill[col_idx_[p]]++;
      t.col_idx_[q] = r;
      t.vals_[q] = vals_[p];
    }
  }
  return t;
}

CsrMatrix CsrMatrix::scaled(double s) const {
  CsrMatrix a = *this;
  for (double& v : a.vals_) v *= s;
  return a;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(n_rows_, n_cols_), 0.0);
  for (Index r = 0; r < static_cast<Index>(d.size()); ++r) d[r] = at(r, r);
  return d;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

double CsrMatrix::max_abs_asymmetry() const {
  if (n_rows_ != n_cols_) {
    throw Error(ErrorKind::ShapeMismatch, "asymmetry of a non-square matrix");
  }
  return add(*this, transpose(), 1.0, -1.0).max_abs();
}

double CsrMatrix::sum() const {
  double s = 0.0;
  for (double v : vals_) s += v;
  return s;
}

CsrMatrix CsrMatrix::submatrix(std::span<const Index> rows,
                               std::span<const Index> cols) const {
  std::vector<Index> col_map(n_cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    col_map[cols[j]] = static_cast<Index>(j);
  }
  CsrMatrix a(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const Index c = col_map[col_idx_[p]];
      if (c < 0) continue;
      a.col_idx_.push_back(c);
      a.vals_.push_back(vals_[p]);
    }
    a.row_ptr_[i + 1] = static_cast<Index>(a.vals_.size());
  }
  return a;
}

void CsrMatrix::write_coo(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  char buf[64];
  for (Index r = 0; r < n_rows_; ++r) {
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, col_idx_[p] + 1,
                    vals_[p]);
      out << buf;
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha,
              double beta) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                std::to_string(a.n_rows()) + "x" + std::to_string(a.n_cols()) +
                    " + " + std::to_string(b.n_rows()) + "x" +
                    std::to_string(b.n_cols()));
  }
  Triplets t;
  t.reserve(a.nnz() + b.nnz());
  for (const auto& [m, s] : {std::pair{&a, alpha}, std::pair{&b, beta}}) {
    for (Index r = 0; r < m->n_rows(); ++r) {
      for (Index p = m->row_ptr()[r]; p < m->row_ptr()[r + 1]; ++p) {
        t.add(r, m->col_idx()[p], s * m->values()[p]);
      }
    }
  }
  return CsrMatrix::from_triplets(a.n_rows(), a.n_cols(), t);
}

}  // namespace femtet
