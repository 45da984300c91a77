#pragma once

#include <vector>

#include "luti/aggregate.hpp"
#include "luti/embedder.hpp"
#include "luti/numeric.hpp"
#include "luti/point_cloud.hpp"
#include "luti/se3.hpp"

namespace luti {

enum class JacobianMode { approx, canonical };

struct RegistrationConfig {
  int max_iters = 20;
  double step_tol = 1e-7;           // stop when |delta xi| < step_tol
  JacobianMode jacobian_mode = JacobianMode::canonical;
  double perturbation = 1e-2;       // finite-difference step (approx mode)
  double ridge = 1e-9;              // Tikhonov ridge for the normal equations
};

struct RegistrationResult {
  se3::RigidTransform g;               // maps source onto target
  std::vector<double> residual_norms;  // one entry per iteration
  int iterations = 0;
  bool converged = false;
};

GlobalFeature embed_aggregate(const Embedder& embedder, const PointCloud& cloud);

/// r = max-aggregate(embed(g . source)) - target_feature.a.
Vector residual(const Embedder& embedder, const se3::RigidTransform& g,
                const PointCloud& source, const GlobalFeature& target_feature);

/// Finite-difference Jacobian of the aggregated target feature, column k
/// equal to (max(embed(exp(-t e_k) . target)) - max(embed(target))) / t.
Matrix approx_jacobian(const Embedder& embedder, const PointCloud& target, double t);

/// Analytical Jacobian: row k is the spatial gradient of channel k at the
/// channel's argmax point, pulled back through point_jacobian and negated to
/// match the inverse-compositional warp direction of approx_jacobian.
Matrix canonical_jacobian(const Embedder& embedder, const PointCloud& target,
                          const GlobalFeature& feature);
Matrix canonical_jacobian(const Lut& lut, const PointCloud& target,
                          const GlobalFeature& feature);

/// Inverse-compositional alignment: the target feature and Jacobian are
/// computed once, then each iteration evaluates the residual, solves
/// delta xi = pinv(J) r and updates g <- exp(delta xi) . g.
RegistrationResult register_clouds(const Embedder& embedder, const PointCloud& source,
                                   const PointCloud& target, const RegistrationConfig& cfg);

/// Rotation angle of the R block in degrees (for error reporting).
double rotation_angle_deg(const se3::RigidTransform& g);

struct PoseError {
  double rotation_deg = 0.0;
  double translation = 0.0;
};

/// Rotation angle of est * inverse(truth) and translation distance.
PoseError pose_error(const se3::RigidTransform& est, const se3::RigidTransform& truth);

}  // namespace luti
