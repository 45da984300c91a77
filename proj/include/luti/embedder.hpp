#pragma once

#include <array>

#include "luti/lattice.hpp"
#include "luti/mlp.hpp"
#include "luti/numeric.hpp"
#include "luti/point_cloud.hpp"

namespace luti {

/// Point feature map R^3 -> R^k with an analytical spatial derivative.
/// Implementations must be safe for concurrent reads.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual int k() const = 0;
  virtual Vector embed(const Vec3& p) const = 0;
  /// k x 3 derivative of embed with respect to the world coordinates.
  virtual Matrix spatial_jacobian(const Vec3& p) const = 0;
  /// One row of spatial_jacobian.
  virtual std::array<double, 3> spatial_gradient(const Vec3& p, int channel) const = 0;
};

/// Direct MLP evaluation. The spatial Jacobian runs one backward pass per
/// output channel.
class MlpEmbedder : public Embedder {
 public:
  explicit MlpEmbedder(const Mlp& mlp) : mlp_(mlp) {}

  int k() const override { return mlp_.out_dim(); }
  Vector embed(const Vec3& p) const override;
  Matrix spatial_jacobian(const Vec3& p) const override;
  std::array<double, 3> spatial_gradient(const Vec3& p, int channel) const override;

 private:
  const Mlp& mlp_;
};

/// Table lookup plus trilinear interpolation.
class LutEmbedder : public Embedder {
 public:
  explicit LutEmbedder(const Lut& lut) : lut_(lut) {}

  int k() const override { return lut_.k; }
  Vector embed(const Vec3& p) const override;
  Matrix spatial_jacobian(const Vec3& p) const override;
  std::array<double, 3> spatial_gradient(const Vec3& p, int channel) const override;

  const Lut& lut() const { return lut_; }

 private:
  const Lut& lut_;
};

}  // namespace luti
