#pragma once

#include <tuple>
#include <vector>

#include "alinet/matrix.hpp"

namespace alinet {

// Compressed-row sparse matrix. Column indices are sorted and unique within
// each row; values are finite. Also used with all-ones values as a boolean
// mask (e.g. the two-hop attention pattern).
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;     // size rows+1
  std::vector<int> col_idx;     // size nnz
  std::vector<double> values;   // size nnz

  SparseMatrix() : row_ptr(1, 0) {}
  SparseMatrix(int r, int c) : rows(r), cols(c), row_ptr(static_cast<std::size_t>(r) + 1, 0) {}

  int nnz() const { return static_cast<int>(col_idx.size()); }
  int row_begin(int i) const { return row_ptr[i]; }
  int row_end(int i) const { return row_ptr[i + 1]; }

  // Builds from (row, col, value) triplets. Throws on out-of-range indices,
  // duplicate coordinates, or non-finite values.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<std::tuple<int, int, double>> triplets);
  static SparseMatrix identity(int n);

  // Same sparsity pattern (shape, row_ptr and col_idx all equal).
  bool same_pattern(const SparseMatrix& o) const;
  // Copy with every stored value replaced.
  SparseMatrix with_values(std::vector<double> vals) const;
  Matrix to_dense() const;
};

// Dense = sparse * dense. O(nnz * b.cols).
Matrix spmm(const SparseMatrix& a, const Matrix& b);
// Dense = sparse^T * dense.
Matrix spmm_tn(const SparseMatrix& a, const Matrix& b);

// Row-wise softmax over the stored entries of `scores` (the mask is the
// sparsity pattern itself). Rows with no entries are skipped. Stabilized by
// per-row max subtraction.
SparseMatrix masked_row_softmax(const SparseMatrix& scores);
// Dense scores restricted to `mask`'s pattern, then softmax as above.
SparseMatrix masked_row_softmax(const Matrix& scores, const SparseMatrix& mask);

// Reverse-mode step through masked_row_softmax: given alpha = softmax(c) and
// dL/dalpha (same pattern), returns dL/dc.
SparseMatrix masked_row_softmax_backward(const SparseMatrix& alpha,
                                         const SparseMatrix& dalpha);

}  // namespace alinet
