#include "alinet/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "alinet/errors.hpp"

namespace alinet {

namespace {

void require_shape(bool ok, const char* what) {
  if (!ok) throw ShapeError(std::string("shape mismatch in ") + what);
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_shape(a.cols == b.rows, "matmul");
  Matrix c(a.rows, b.cols);
  // ikj order keeps all accesses sequential.
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require_shape(a.rows == b.rows, "matmul_tn");
  Matrix c(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const double* arow = a.row(k);
    const double* brow = b.row(k);
    for (int i = 0; i < a.cols; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = c.row(i);
      for (int j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require_shape(a.cols == b.cols, "matmul_nt");
  Matrix c(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      crow[j] = acc;
    }
  }
  return c;
}

void add_inplace(Matrix& a, const Matrix& b) {
  require_shape(a.same_shape(b), "add");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void sub_inplace(Matrix& a, const Matrix& b) {
  require_shape(a.same_shape(b), "sub");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
}

void scale_inplace(Matrix& a, double s) {
  for (double& v : a.data) v *= s;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_shape(a.same_shape(b), "hadamard");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] *= b.data[i];
  return c;
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  add_inplace(c, b);
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  sub_inplace(c, b);
  return c;
}

Matrix column_sums(const Matrix& a) {
  Matrix s(1, a.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    for (int j = 0; j < a.cols; ++j) s.data[j] += arow[j];
  }
  return s;
}

bool all_finite(const Matrix& a) {
  for (double v : a.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  }
  return m;
}

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << name << ' ' << m.rows << ' ' << m.cols << '\n';
  char buf[40];
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    for (int j = 0; j < m.cols; ++j) {
      // %.17g round-trips IEEE doubles exactly.
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

std::pair<std::string, Matrix> read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("matrix read: missing header");
  std::istringstream hs(header);
  std::string name;
  long long rows = -1, cols = -1;
  if (!(hs >> name >> rows >> cols) || rows < 0 || cols < 0) {
    throw FormatError("matrix read: malformed header '" + header + "'");
  }
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  std::string line;
  for (int i = 0; i < m.rows; ++i) {
    if (!std::getline(in, line)) {
      throw FormatError("matrix read: truncated data for '" + name + "'");
    }
    const char* p = line.c_str();
    char* end = nullptr;
    for (int j = 0; j < m.cols; ++j) {
      double v = std::strtod(p, &end);
      if (end == p) {
        throw FormatError("matrix read: bad value in '" + name + "' row " +
                          std::to_string(i));
      }
      m(i, j) = v;
      p = end;
    }
  }
  return {name, std::move(m)};
}

}  // namespace alinet
