#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alinet {

// Dense row-major matrix of 64-bit floats. Rows index entities throughout
// the model, so "row i" and "entity i" are used interchangeably.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  std::size_t size() const { return data.size(); }

  static Matrix identity(int n);
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A^T * B  (a is stored untransposed)
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// C = A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

void add_inplace(Matrix& a, const Matrix& b);
void sub_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);

// Row vector (1 x cols) of column sums.
Matrix column_sums(const Matrix& a);

bool all_finite(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Checkpoint text format: a header line "name rows cols" followed by one
// line of decimal values per row. Values are written with enough digits to
// round-trip doubles exactly.
void write_matrix(std::ostream& out, const std::string& name, const Matrix& m);
// Reads one matrix at the current stream position. Throws FormatError on
// truncated or malformed input.
std::pair<std::string, Matrix> read_matrix(std::istream& in);

}  // namespace alinet
