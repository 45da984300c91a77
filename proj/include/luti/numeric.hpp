#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace luti {

using Vector = std::vector<double>;

/// Dense row-major matrix of 64-bit floats.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  static Matrix identity(int n);
};

Matrix matmul(const Matrix& a, const Matrix& b);

Vector matvec(const Matrix& a, const Vector& x);

/// Least-squares solve x = argmin |J x - r|^2 via the normal equations
/// (J^T J + ridge I) x = J^T r. Requires j.cols <= j.rows. With ridge = 0
/// a rank-deficient J^T J raises an error suggesting ridge > 0.
Vector pinv_apply(const Matrix& j, const Vector& r, double ridge = 1e-9);

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

}  // namespace luti
