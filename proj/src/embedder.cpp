#include "luti/embedder.hpp"

namespace luti {

Vector MlpEmbedder::embed(const Vec3& p) const { return forward(mlp_, p); }

Matrix MlpEmbedder::spatial_jacobian(const Vec3& p) const {
  const int k = mlp_.out_dim();
  MlpActivations acts;
  forward_cached(mlp_, Vector{p[0], p[1], p[2]}, acts);
  Matrix jac(k, 3);
  Vector upstream(k, 0.0);
  for (int c = 0; c < k; ++c) {
    upstream[c] = 1.0;
    MlpGradients g = backward(mlp_, acts, upstream);
    upstream[c] = 0.0;
    for (int a = 0; a < 3; ++a) jac(c, a) = g.dinput[a];
  }
  return jac;
}

std::array<double, 3> MlpEmbedder::spatial_gradient(const Vec3& p, int channel) const {
  MlpActivations acts;
  forward_cached(mlp_, Vector{p[0], p[1], p[2]}, acts);
  Vector upstream(mlp_.out_dim(), 0.0);
  upstream.at(channel) = 1.0;
  MlpGradients g = backward(mlp_, acts, upstream);
  return {g.dinput[0], g.dinput[1], g.dinput[2]};
}

Vector LutEmbedder::embed(const Vec3& p) const { return interpolate(lut_, locate(lut_.lattice, p)); }

Matrix LutEmbedder::spatial_jacobian(const Vec3& p) const {
  return luti::spatial_jacobian(lut_, locate(lut_.lattice, p));
}

std::array<double, 3> LutEmbedder::spatial_gradient(const Vec3& p, int channel) const {
  return luti::spatial_gradient(lut_, locate(lut_.lattice, p), channel);
}

}  // namespace luti
