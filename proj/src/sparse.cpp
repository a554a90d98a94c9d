#include "alinet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alinet/errors.hpp"

namespace alinet {

SparseMatrix SparseMatrix::from_triplets(
    int rows, int cols, std::vector<std::tuple<int, int, double>> triplets) {
  for (const auto& [r, c, v] : triplets) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ShapeError("sparse triplet (" + std::to_string(r) + "," +
                       std::to_string(c) + ") out of range");
    }
    if (!std::isfinite(v)) throw NumericError("sparse triplet value not finite");
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  SparseMatrix m(rows, cols);
  m.col_idx.reserve(triplets.size());
  m.values.reserve(triplets.size());
  int prev_r = -1, prev_c = -1;
  for (const auto& [r, c, v] : triplets) {
    if (r == prev_r && c == prev_c) {
      throw ShapeError("duplicate sparse coordinate (" + std::to_string(r) +
                       "," + std::to_string(c) + ")");
    }
    m.col_idx.push_back(c);
    m.values.push_back(v);
    m.row_ptr[r + 1] += 1;
    prev_r = r;
    prev_c = c;
  }
  for (int i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m(n, n);
  m.col_idx.resize(n);
  m.values.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    m.col_idx[i] = i;
    m.row_ptr[i + 1] = i + 1;
  }
  return m;
}

bool SparseMatrix::same_pattern(const SparseMatrix& o) const {
  return rows == o.rows && cols == o.cols && row_ptr == o.row_ptr &&
         col_idx == o.col_idx;
}

SparseMatrix SparseMatrix::with_values(std::vector<double> vals) const {
  if (vals.size() != values.size()) {
    throw ShapeError("with_values: value count mismatch");
  }
  SparseMatrix m = *this;
  m.values = std::move(vals);
  return m;
}

Matrix SparseMatrix::to_dense() const {
  Matrix d(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = row_begin(i); k < row_end(i); ++k) d(i, col_idx[k]) = values[k];
  }
  return d;
}

Matrix spmm(const SparseMatrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ShapeError("spmm: inner dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* crow = c.row(i);
    for (int k = a.row_begin(i); k < a.row_end(i); ++k) {
      const double v = a.values[k];
      const double* brow = b.row(a.col_idx[k]);
      for (int j = 0; j < b.cols; ++j) crow[j] += v * brow[j];
    }
  }
  return c;
}

Matrix spmm_tn(const SparseMatrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw ShapeError("spmm_tn: inner dimension mismatch");
  Matrix c(a.cols, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* brow = b.row(i);
    for (int k = a.row_begin(i); k < a.row_end(i); ++k) {
      const double v = a.values[k];
      double* crow = c.row(a.col_idx[k]);
      for (int j = 0; j < b.cols; ++j) crow[j] += v * brow[j];
    }
  }
  return c;
}

SparseMatrix masked_row_softmax(const SparseMatrix& scores) {
  SparseMatrix out = scores;
  for (int i = 0; i < scores.rows; ++i) {
    const int lo = scores.row_begin(i), hi = scores.row_end(i);
    if (lo == hi) continue;  // empty mask row: no weights emitted
    double mx = scores.values[lo];
    for (int k = lo + 1; k < hi; ++k) mx = std::max(mx, scores.values[k]);
    double sum = 0.0;
    for (int k = lo; k < hi; ++k) {
      out.values[k] = std::exp(scores.values[k] - mx);
      sum += out.values[k];
    }
    for (int k = lo; k < hi; ++k) out.values[k] /= sum;
  }
  return out;
}

SparseMatrix masked_row_softmax(const Matrix& scores, const SparseMatrix& mask) {
  if (scores.rows != mask.rows || scores.cols != mask.cols) {
    throw ShapeError("masked_row_softmax: scores/mask shape mismatch");
  }
  SparseMatrix picked = mask;
  for (int i = 0; i < mask.rows; ++i) {
    for (int k = mask.row_begin(i); k < mask.row_end(i); ++k) {
      picked.values[k] = scores(i, mask.col_idx[k]);
    }
  }
  return masked_row_softmax(picked);
}

SparseMatrix masked_row_softmax_backward(const SparseMatrix& alpha,
                                         const SparseMatrix& dalpha) {
  if (!alpha.same_pattern(dalpha)) {
    throw ShapeError("softmax backward: pattern mismatch");
  }
  SparseMatrix dc = alpha;
  for (int i = 0; i < alpha.rows; ++i) {
    const int lo = alpha.row_begin(i), hi = alpha.row_end(i);
    double dot = 0.0;
    for (int k = lo; k < hi; ++k) dot += alpha.values[k] * dalpha.values[k];
    for (int k = lo; k < hi; ++k) {
      dc.values[k] = alpha.values[k] * (dalpha.values[k] - dot);
    }
  }
  return dc;
}

}  // namespace alinet
