#include "luti/se3.hpp"

#include <cmath>
#include <stdexcept>

namespace luti::se3 {

RigidTransform RigidTransform::identity() {
  RigidTransform g;
  g.m = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  return g;
}

namespace {

using Mat3 = std::array<double, 9>;

// Rotation generator consistent with point_jacobian: d/ds exp(s e_k) p at
// s = 0 equals column k of [[0,-z,y],[z,0,-x],[-y,x,0] | I], which fixes
// the generator as the negated hat operator.
Mat3 omega_generator(const Twist& xi) {
  const double w1 = xi[0], w2 = xi[1], w3 = xi[2];
  return {0, w3, -w2, -w3, 0, w1, w2, -w1, 0};
}

Mat3 mul3(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) s += a[i * 3 + l] * b[l * 3 + j];
      c[i * 3 + j] = s;
    }
  return c;
}

RigidTransform assemble(const Mat3& r, const Mat3& v, const Twist& xi) {
  RigidTransform g = RigidTransform::identity();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g(i, j) = r[i * 3 + j];
    g(i, 3) = v[i * 3 + 0] * xi[3] + v[i * 3 + 1] * xi[4] + v[i * 3 + 2] * xi[5];
  }
  return g;
}

void validate_rotation(const RigidTransform& g) {
  // R^T R = I and det R = 1, within 1e-9.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int l = 0; l < 3; ++l) dot += g(l, i) * g(l, j);
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot - expect) > 1e-9) throw std::runtime_error("exp: rotation block not orthonormal");
    }
  }
  const double det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) -
                     g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0)) +
                     g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
  if (std::abs(det - 1.0) > 1e-9) throw std::runtime_error("exp: rotation determinant not 1");
}

}  // namespace

namespace detail {

RigidTransform exp_rodrigues(const Twist& xi) {
  const double theta = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  const Mat3 omega = omega_generator(xi);
  const Mat3 omega2 = mul3(omega, omega);
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  const double c = (theta - std::sin(theta)) / (theta * theta * theta);
  Mat3 r{}, v{};
  for (int i = 0; i < 9; ++i) {
    const double eye = (i % 4 == 0) ? 1.0 : 0.0;
    r[i] = eye + a * omega[i] + b * omega2[i];
    v[i] = eye + b * omega[i] + c * omega2[i];
  }
  return assemble(r, v, xi);
}

RigidTransform exp_taylor(const Twist& xi) {
  const Mat3 omega = omega_generator(xi);
  const Mat3 omega2 = mul3(omega, omega);
  Mat3 r{}, v{};
  for (int i = 0; i < 9; ++i) {
    const double eye = (i % 4 == 0) ? 1.0 : 0.0;
    r[i] = eye + omega[i] + 0.5 * omega2[i];
    v[i] = eye + 0.5 * omega[i] + omega2[i] / 6.0;
  }
  return assemble(r, v, xi);
}

}  // namespace detail

RigidTransform exp(const Twist& xi) {
  for (double x : xi) {
    if (!std::isfinite(x)) throw std::invalid_argument("exp: non-finite twist");
  }
  const double theta = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  RigidTransform g = theta < 1e-8 ? detail::exp_taylor(xi) : detail::exp_rodrigues(xi);
  validate_rotation(g);
  return g;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform c;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int l = 0; l < 4; ++l) s += a(i, l) * b(l, j);
      c(i, j) = s;
    }
  return c;
}

RigidTransform inverse(const RigidTransform& g) {
  RigidTransform inv = RigidTransform::identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv(i, j) = g(j, i);  // R^T
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int l = 0; l < 3; ++l) s += g(l, i) * g(l, 3);
    inv(i, 3) = -s;
  }
  return inv;
}

Vec3 apply(const RigidTransform& g, const Vec3& p) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    out[i] = g(i, 0) * p[0] + g(i, 1) * p[1] + g(i, 2) * p[2] + g(i, 3);
  }
  return out;
}

Matrix point_jacobian(const Vec3& p) {
  const double x = p[0], y = p[1], z = p[2];
  Matrix j(3, 6);
  j(0, 1) = -z;
  j(0, 2) = y;
  j(1, 0) = z;
  j(1, 2) = -x;
  j(2, 0) = -y;
  j(2, 1) = x;
  j(0, 3) = 1.0;
  j(1, 4) = 1.0;
  j(2, 5) = 1.0;
  return j;
}

Matrix pullback(const Matrix& spatial, const Vec3& p) {
  if (spatial.cols != 3) throw std::invalid_argument("pullback: spatial Jacobian must be k x 3");
  return matmul(spatial, point_jacobian(p));
}

PointCloud transform_cloud(const RigidTransform& g, const PointCloud& cloud) {
  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(apply(g, p));
  return out;
}

}  // namespace luti::se3
