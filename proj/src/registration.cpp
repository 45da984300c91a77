#include "luti/registration.hpp"

#include <cmath>
#include <stdexcept>

namespace luti {

GlobalFeature embed_aggregate(const Embedder& embedder, const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("embed_aggregate: empty point cloud");
  const int k = embedder.k();
  Matrix embeddings(cloud.size(), k);
  for (int i = 0; i < cloud.size(); ++i) {
    const Vector z = embedder.embed(cloud.points[i]);
    for (int c = 0; c < k; ++c) embeddings(i, c) = z[c];
  }
  return max_aggregate(embeddings);
}

Vector residual(const Embedder& embedder, const se3::RigidTransform& g,
                const PointCloud& source, const GlobalFeature& target_feature) {
  if (source.points.empty()) throw std::invalid_argument("residual: empty source cloud");
  if (embedder.k() != static_cast<int>(target_feature.a.size())) {
    throw std::invalid_argument("residual: embedder and target feature disagree on k");
  }
  const GlobalFeature warped = embed_aggregate(embedder, se3::transform_cloud(g, source));
  Vector r(embedder.k());
  for (int c = 0; c < embedder.k(); ++c) r[c] = warped.a[c] - target_feature.a[c];
  return r;
}

Matrix approx_jacobian(const Embedder& embedder, const PointCloud& target, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("approx_jacobian: perturbation must be positive");
  const int k = embedder.k();
  const GlobalFeature base = embed_aggregate(embedder, target);
  Matrix jac(k, 6);
  for (int col = 0; col < 6; ++col) {
    se3::Twist xi{};
    xi[col] = -t;
    const GlobalFeature shifted = embed_aggregate(embedder, se3::transform_cloud(se3::exp(xi), target));
    for (int c = 0; c < k; ++c) jac(c, col) = (shifted.a[c] - base.a[c]) / t;
  }
  return jac;
}

Matrix canonical_jacobian(const Embedder& embedder, const PointCloud& target,
                          const GlobalFeature& feature) {
  const int k = embedder.k();
  if (k != static_cast<int>(feature.a.size())) {
    throw std::invalid_argument("canonical_jacobian: embedder and feature disagree on k");
  }
  Matrix jac(k, 6);
  for (int c = 0; c < k; ++c) {
    const Vec3& p = target.points.at(feature.argmax[c]);
    const std::array<double, 3> grad = embedder.spatial_gradient(p, c);
    const Matrix pj = se3::point_jacobian(p);
    for (int col = 0; col < 6; ++col) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a) s += grad[a] * pj(a, col);
      jac(c, col) = -s;  // inverse-compositional warp direction
    }
  }
  return jac;
}

Matrix canonical_jacobian(const Lut& lut, const PointCloud& target, const GlobalFeature& feature) {
  LutEmbedder embedder(lut);
  return canonical_jacobian(embedder, target, feature);
}

RegistrationResult register_clouds(const Embedder& embedder, const PointCloud& source,
                                   const PointCloud& target, const RegistrationConfig& cfg) {
  if (source.points.empty() || target.points.empty()) {
    throw std::invalid_argument("register_clouds: point clouds must be non-empty");
  }
  if (cfg.max_iters < 1) throw std::invalid_argument("register_clouds: max_iters must be >= 1");

  const GlobalFeature target_feature = embed_aggregate(embedder, target);
  const Matrix jac = cfg.jacobian_mode == JacobianMode::approx
                         ? approx_jacobian(embedder, target, cfg.perturbation)
                         : canonical_jacobian(embedder, target, target_feature);

  RegistrationResult result;
  result.g = se3::RigidTransform::identity();
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Vector r = residual(embedder, result.g, source, target_feature);
    double norm = 0.0;
    for (double x : r) norm += x * x;
    result.residual_norms.push_back(std::sqrt(norm));
    result.iterations = iter + 1;

    const Vector delta = pinv_apply(jac, r, cfg.ridge);
    if (!all_finite(delta)) {
      throw std::runtime_error("register_clouds: non-finite pose update at iteration " +
                               std::to_string(iter + 1));
    }
    se3::Twist xi{delta[0], delta[1], delta[2], delta[3], delta[4], delta[5]};
    result.g = se3::compose(se3::exp(xi), result.g);

    double step = 0.0;
    for (double x : delta) step += x * x;
    if (std::sqrt(step) < cfg.step_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double rotation_angle_deg(const se3::RigidTransform& g) {
  const double trace = g(0, 0) + g(1, 1) + g(2, 2);
  const double c = std::min(1.0, std::max(-1.0, (trace - 1.0) / 2.0));
  return std::acos(c) * 180.0 / M_PI;
}

PoseError pose_error(const se3::RigidTransform& est, const se3::RigidTransform& truth) {
  PoseError err;
  err.rotation_deg = rotation_angle_deg(se3::compose(est, se3::inverse(truth)));
  const Vec3 te = est.translation(), tt = truth.translation();
  err.translation = std::sqrt((te[0] - tt[0]) * (te[0] - tt[0]) + (te[1] - tt[1]) * (te[1] - tt[1]) +
                              (te[2] - tt[2]) * (te[2] - tt[2]));
  return err;
}

}  // namespace luti
