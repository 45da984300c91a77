#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "luti/lattice.hpp"
#include "luti/numeric.hpp"
#include "luti/point_cloud.hpp"

namespace luti {

enum class Activation { relu, none };

struct Layer {
  Matrix w;       // out x in, row-major
  Vector b;       // out
  Activation act = Activation::relu;
};

/// Fully-connected stack. Layer dims must chain; the embedding network has
/// in_dim = 3 and out_dim = k.
struct Mlp {
  std::vector<Layer> layers;

  int in_dim() const { return layers.empty() ? 0 : layers.front().w.cols; }
  int out_dim() const { return layers.empty() ? 0 : layers.back().w.rows; }
};

/// Builds an MLP with the given dims (e.g. {3, 64, 64, 128, k}), relu on
/// hidden layers and a linear output layer. He-uniform weights, zero bias.
Mlp make_mlp(const std::vector<int>& dims, uint64_t seed);

Vector forward(const Mlp& mlp, const Vector& x);
Vector forward(const Mlp& mlp, const Vec3& p);

/// Per-layer values cached by forward_cached for use in backward.
struct MlpActivations {
  Vector input;
  std::vector<Vector> pre;   // pre-activation per layer
  std::vector<Vector> post;  // post-activation per layer
};

Vector forward_cached(const Mlp& mlp, const Vector& x, MlpActivations& acts);

struct MlpGradients {
  std::vector<Matrix> dw;
  std::vector<Vector> db;
  Vector dinput;

  static MlpGradients zeros_like(const Mlp& mlp);
};

/// Gradients of upstream . forward(x) with respect to every weight, bias
/// and the input, from cached activations.
MlpGradients backward(const Mlp& mlp, const MlpActivations& acts, const Vector& upstream);

/// As backward, but adds into an existing accumulator (dinput is returned).
Vector backward_accumulate(const Mlp& mlp, const MlpActivations& acts, const Vector& upstream,
                           MlpGradients& acc);

struct BatchNormParams {
  Vector gamma;
  Vector beta;
  Vector mean;
  Vector var;
  double eps = 1e-5;
};

/// Returns (w', b') with w' x + b' = gamma * ((w x + b) - mean) / sqrt(var + eps) + beta.
std::pair<Matrix, Vector> fold_batchnorm(const Matrix& w, const Vector& b,
                                         const BatchNormParams& bn);

/// Evaluates the MLP at every lattice node and stores the outputs as 32-bit
/// floats. Requires in_dim = 3. Deterministic: repeated calls are bitwise
/// identical regardless of the worker count (nodes are written disjointly).
Lut tabulate(const Mlp& mlp, const Lattice3& lattice, int threads = 1);

}  // namespace luti
