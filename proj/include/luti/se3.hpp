#pragma once

#include <array>

#include "luti/numeric.hpp"
#include "luti/point_cloud.hpp"

namespace luti::se3 {

/// Twist coordinates (w1, w2, w3, v1, v2, v3): rotation part in radians,
/// translation part in world units.
using Twist = std::array<double, 6>;

/// Homogeneous rigid transform. Rotation block R is orthonormal with
/// det R = 1; bottom row is (0,0,0,1).
struct RigidTransform {
  std::array<double, 16> m{};  // row-major 4x4

  double operator()(int r, int c) const { return m[r * 4 + c]; }
  double& operator()(int r, int c) { return m[r * 4 + c]; }

  Vec3 translation() const { return {m[3], m[7], m[11]}; }

  static RigidTransform identity();
};

/// Exponential map from twist coordinates. The generators are fixed so that
/// d/ds exp(s e_k) p at s = 0 reproduces the columns of point_jacobian;
/// closed form (Rodrigues plus V-matrix), with a second-order Taylor branch
/// for |w| < 1e-8. Validates the rotation block on exit.
RigidTransform exp(const Twist& xi);

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& g);
Vec3 apply(const RigidTransform& g, const Vec3& p);

/// Derivative of the warped point with respect to the twist, as a 3x6
/// matrix: skew block [[0,-z,y],[z,0,-x],[-y,x,0]] in the rotation columns,
/// identity in the translation columns.
Matrix point_jacobian(const Vec3& p);

/// Chain rule: (k x 3 spatial Jacobian) times point_jacobian(p) -> k x 6.
Matrix pullback(const Matrix& spatial, const Vec3& p);

PointCloud transform_cloud(const RigidTransform& g, const PointCloud& cloud);

namespace detail {
/// Closed-form branch, valid away from |w| = 0.
RigidTransform exp_rodrigues(const Twist& xi);
/// Second-order Taylor branch for small |w|.
RigidTransform exp_taylor(const Twist& xi);
}  // namespace detail

}  // namespace luti::se3
