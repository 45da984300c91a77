#include "luti/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace luti {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("matmul: dimension mismatch (" + std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " * " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols) + ")");
  }
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int l = 0; l < a.cols; ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      const double* brow = &b.data[static_cast<size_t>(l) * b.cols];
      double* crow = &c.data[static_cast<size_t>(i) * c.cols];
      for (int j = 0; j < b.cols; ++j) crow[j] += ail * brow[j];
    }
  }
  return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols != static_cast<int>(x.size())) {
    throw std::invalid_argument("matvec: dimension mismatch");
  }
  Vector y(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double* row = &a.data[static_cast<size_t>(i) * a.cols];
    double acc = 0.0;
    for (int j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

namespace {

// Cholesky factorization in place; returns false on a non-positive pivot.
bool cholesky(Matrix& a) {
  const int n = a.rows;
  for (int j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (int l = 0; l < j; ++l) diag -= a(j, l) * a(j, l);
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double root = std::sqrt(diag);
    a(j, j) = root;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int l = 0; l < j; ++l) s -= a(i, l) * a(j, l);
      a(i, j) = s / root;
    }
  }
  return true;
}

Vector cholesky_solve(const Matrix& l, const Vector& rhs) {
  const int n = l.rows;
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double s = rhs[i];
    for (int j = 0; j < i; ++j) s -= l(i, j) * y[j];
    y[i] = s / l(i, i);
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int j = i + 1; j < n; ++j) s -= l(j, i) * x[j];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace

Vector pinv_apply(const Matrix& j, const Vector& r, double ridge) {
  if (j.rows != static_cast<int>(r.size())) {
    throw std::invalid_argument("pinv_apply: row count does not match residual length");
  }
  if (j.cols > j.rows) {
    throw std::invalid_argument("pinv_apply: expects a tall system (cols <= rows)");
  }
  const int n = j.cols;
  Matrix normal(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < j.rows; ++i) s += j(i, a) * j(i, b);
      normal(a, b) = s;
      normal(b, a) = s;
    }
    normal(a, a) += ridge;
  }
  Vector rhs(n, 0.0);
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int i = 0; i < j.rows; ++i) s += j(i, a) * r[i];
    rhs[a] = s;
  }
  if (!cholesky(normal)) {
    throw std::runtime_error("pinv_apply: singular normal equations; retry with ridge > 0");
  }
  return cholesky_solve(normal, rhs);
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

}  // namespace luti
