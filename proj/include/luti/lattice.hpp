#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "luti/numeric.hpp"
#include "luti/point_cloud.hpp"

namespace luti {

/// Regular cubic lattice with d nodes per axis over [lo, hi].
struct Lattice3 {
  int d = 2;
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};

  Lattice3() = default;
  Lattice3(int d_, const Vec3& lo_, const Vec3& hi_);
  explicit Lattice3(int d_) : Lattice3(d_, {-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}) {}

  double step(int axis) const { return (hi[axis] - lo[axis]) / (d - 1); }
  double node_coord(int axis, int i) const { return lo[axis] + step(axis) * i; }
  Vec3 node_position(int ix, int iy, int iz) const {
    return {node_coord(0, ix), node_coord(1, iy), node_coord(2, iz)};
  }
  int node_index(int ix, int iy, int iz) const { return (ix * d + iy) * d + iz; }
  int node_count() const { return d * d * d; }
};

/// Tabulated embedding basis: one k-vector per lattice node, stored as
/// 32-bit floats with layout ((ix*d + iy)*d + iz)*k + channel.
struct Lut {
  Lattice3 lattice;
  int k = 0;
  std::vector<float> data;

  Lut() = default;
  Lut(const Lattice3& lat, int k_)
      : lattice(lat), k(k_), data(static_cast<size_t>(lat.node_count()) * k_, 0.0f) {}

  const float* node(int flat) const { return data.data() + static_cast<size_t>(flat) * k; }
  float* node(int flat) { return data.data() + static_cast<size_t>(flat) * k; }
};

/// 64-bit gradient accumulator with the same shape as a Lut.
struct LutGrad {
  Lattice3 lattice;
  int k = 0;
  std::vector<double> data;

  LutGrad() = default;
  LutGrad(const Lattice3& lat, int k_)
      : lattice(lat), k(k_), data(static_cast<size_t>(lat.node_count()) * k_, 0.0) {}

  double* node(int flat) { return data.data() + static_cast<size_t>(flat) * k; }
};

/// Result of locating a point in its lattice cell. Corner order is
/// (000,001,010,011,100,101,110,111) with bits (x,y,z); bit 1 selects the
/// upper node of the cell along that axis.
struct CellQuery {
  std::array<int, 3> cell{};                // base corner, each in [0, d-2]
  Vec3 frac{};                              // fractional offset in [0,1]^3
  std::array<double, 8> weights{};          // trilinear weights, sum to 1
  std::array<int, 8> corners{};             // flat node indices
  std::array<bool, 3> clamped{};            // point fell strictly outside [lo,hi]
};

/// Clamps p to the lattice bounds and computes cell, fractional offsets,
/// trilinear weights and corner node indices. Non-finite input is an error.
CellQuery locate(const Lattice3& lattice, const Vec3& p);

/// Weighted sum of the 8 corner basis vectors, accumulated in corner order.
Vector interpolate(const Lut& lut, const CellQuery& q);

/// Analytical derivative of interpolate with respect to world coordinates,
/// as a k x 3 matrix. Columns of clamped axes are zero. Within a cell the
/// column for axis x is the bilinear combination of corner differences
/// along x, scaled by (d-1)/(hi_x - lo_x); the derivative is one-sided at
/// cell faces (taken from the cell chosen by locate).
Matrix spatial_jacobian(const Lut& lut, const CellQuery& q);

/// Single row of spatial_jacobian, avoiding the full k x 3 computation.
std::array<double, 3> spatial_gradient(const Lut& lut, const CellQuery& q, int channel);

/// Distributes an upstream embedding gradient onto the 8 corner nodes using
/// the forward interpolation weights.
void scatter_gradient(LutGrad& lut_grad, const CellQuery& q, const Vector& upstream);

/// Index of the lattice node nearest to p (per-axis round, clamped).
int nearest_node(const Lattice3& lattice, const Vec3& p);

}  // namespace luti
