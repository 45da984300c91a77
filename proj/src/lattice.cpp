#include "luti/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace luti {

Lattice3::Lattice3(int d_, const Vec3& lo_, const Vec3& hi_) : d(d_), lo(lo_), hi(hi_) {
  if (d < 2) throw std::invalid_argument("Lattice3: need at least 2 nodes per axis");
  for (int a = 0; a < 3; ++a) {
    if (!(lo[a] < hi[a])) throw std::invalid_argument("Lattice3: lo must be below hi on every axis");
  }
}

CellQuery locate(const Lattice3& lattice, const Vec3& p) {
  CellQuery q;
  const int d = lattice.d;
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(p[a])) throw std::invalid_argument("locate: non-finite point coordinate");
    double c = p[a];
    if (c < lattice.lo[a]) {
      c = lattice.lo[a];
      q.clamped[a] = true;
    } else if (c > lattice.hi[a]) {
      c = lattice.hi[a];
      q.clamped[a] = true;
    }
    const double u = (c - lattice.lo[a]) / (lattice.hi[a] - lattice.lo[a]) * (d - 1);
    int cell = static_cast<int>(std::floor(u));
    if (cell > d - 2) cell = d - 2;
    if (cell < 0) cell = 0;
    q.cell[a] = cell;
    q.frac[a] = u - cell;
  }
  const double ax[2] = {1.0 - q.frac[0], q.frac[0]};
  const double ay[2] = {1.0 - q.frac[1], q.frac[1]};
  const double az[2] = {1.0 - q.frac[2], q.frac[2]};
  for (int j = 0; j < 8; ++j) {
    const int bx = (j >> 2) & 1, by = (j >> 1) & 1, bz = j & 1;
    q.weights[j] = ax[bx] * ay[by] * az[bz];
    q.corners[j] = lattice.node_index(q.cell[0] + bx, q.cell[1] + by, q.cell[2] + bz);
  }
  return q;
}

Vector interpolate(const Lut& lut, const CellQuery& q) {
  Vector out(lut.k, 0.0);
  // Corner-order accumulation keeps the on-the-fly and tabulated paths
  // bitwise identical.
  for (int j = 0; j < 8; ++j) {
    const double w = q.weights[j];
    const float* corner = lut.node(q.corners[j]);
    for (int c = 0; c < lut.k; ++c) out[c] += w * static_cast<double>(corner[c]);
  }
  return out;
}

namespace {

// Corner pairs differing only in the given axis bit, low corner first,
// with the bilinear weight over the other two axes.
struct AxisPair {
  int low, high;
  double w;
};

void axis_pairs(const CellQuery& q, int axis, AxisPair out[4]) {
  const double f[3] = {q.frac[0], q.frac[1], q.frac[2]};
  int n = 0;
  for (int j = 0; j < 8; ++j) {
    const int bit = (j >> (2 - axis)) & 1;
    if (bit) continue;
    double w = 1.0;
    for (int a = 0; a < 3; ++a) {
      if (a == axis) continue;
      const int b = (j >> (2 - a)) & 1;
      w *= b ? f[a] : 1.0 - f[a];
    }
    out[n++] = {j, j | (1 << (2 - axis)), w};
  }
}

}  // namespace

Matrix spatial_jacobian(const Lut& lut, const CellQuery& q) {
  Matrix jac(lut.k, 3);
  const Lattice3& lat = lut.lattice;
  for (int axis = 0; axis < 3; ++axis) {
    if (q.clamped[axis]) continue;  // flat beyond the bounds
    AxisPair pairs[4];
    axis_pairs(q, axis, pairs);
    const double scale = (lat.d - 1) / (lat.hi[axis] - lat.lo[axis]);
    for (const AxisPair& pr : pairs) {
      const float* lo = lut.node(q.corners[pr.low]);
      const float* hi = lut.node(q.corners[pr.high]);
      const double w = pr.w * scale;
      for (int c = 0; c < lut.k; ++c) {
        jac(c, axis) += w * (static_cast<double>(hi[c]) - static_cast<double>(lo[c]));
      }
    }
  }
  return jac;
}

std::array<double, 3> spatial_gradient(const Lut& lut, const CellQuery& q, int channel) {
  if (channel < 0 || channel >= lut.k) throw std::invalid_argument("spatial_gradient: channel out of range");
  std::array<double, 3> g{};
  const Lattice3& lat = lut.lattice;
  for (int axis = 0; axis < 3; ++axis) {
    if (q.clamped[axis]) continue;
    AxisPair pairs[4];
    axis_pairs(q, axis, pairs);
    const double scale = (lat.d - 1) / (lat.hi[axis] - lat.lo[axis]);
    double acc = 0.0;
    for (const AxisPair& pr : pairs) {
      const double lo = lut.node(q.corners[pr.low])[channel];
      const double hi = lut.node(q.corners[pr.high])[channel];
      acc += pr.w * (hi - lo);
    }
    g[axis] = acc * scale;
  }
  return g;
}

void scatter_gradient(LutGrad& lut_grad, const CellQuery& q, const Vector& upstream) {
  if (static_cast<int>(upstream.size()) != lut_grad.k) {
    throw std::invalid_argument("scatter_gradient: upstream length mismatch");
  }
  if (!all_finite(upstream)) throw std::invalid_argument("scatter_gradient: non-finite upstream");
  for (int j = 0; j < 8; ++j) {
    const double w = q.weights[j];
    double* slot = lut_grad.node(q.corners[j]);
    for (int c = 0; c < lut_grad.k; ++c) slot[c] += w * upstream[c];
  }
}

int nearest_node(const Lattice3& lattice, const Vec3& p) {
  int idx[3];
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(p[a])) throw std::invalid_argument("nearest_node: non-finite point coordinate");
    double c = std::min(std::max(p[a], lattice.lo[a]), lattice.hi[a]);
    const double u = (c - lattice.lo[a]) / (lattice.hi[a] - lattice.lo[a]) * (lattice.d - 1);
    int i = static_cast<int>(std::lround(u));
    if (i < 0) i = 0;
    if (i > lattice.d - 1) i = lattice.d - 1;
    idx[a] = i;
  }
  return lattice.node_index(idx[0], idx[1], idx[2]);
}

}  // namespace luti
