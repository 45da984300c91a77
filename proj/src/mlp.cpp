#include "luti/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace luti {

Mlp make_mlp(const std::vector<int>& dims, uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output dims");
  std::mt19937_64 rng(seed);
  Mlp mlp;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    if (in < 1 || out < 1) throw std::invalid_argument("make_mlp: layer dims must be positive");
    Layer layer;
    layer.w = Matrix(out, in);
    layer.b = Vector(out, 0.0);
    const double limit = std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.w.data) w = dist(rng);
    layer.act = (l + 2 < dims.size()) ? Activation::relu : Activation::none;
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

namespace {

void affine(const Layer& layer, const Vector& x, Vector& out) {
  const int rows = layer.w.rows, cols = layer.w.cols;
  out.resize(rows);
  for (int i = 0; i < rows; ++i) {
    const double* wrow = &layer.w.data[static_cast<size_t>(i) * cols];
    double acc = layer.b[i];
    for (int j = 0; j < cols; ++j) acc += wrow[j] * x[j];
    out[i] = acc;
  }
}

}  // namespace

Vector forward(const Mlp& mlp, const Vector& x) {
  if (static_cast<int>(x.size()) != mlp.in_dim()) {
    throw std::invalid_argument("forward: input dim mismatch");
  }
  Vector cur = x, next;
  for (const Layer& layer : mlp.layers) {
    affine(layer, cur, next);
    if (layer.act == Activation::relu) {
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    }
    cur.swap(next);
  }
  return cur;
}

Vector forward(const Mlp& mlp, const Vec3& p) { return forward(mlp, Vector{p[0], p[1], p[2]}); }

Vector forward_cached(const Mlp& mlp, const Vector& x, MlpActivations& acts) {
  if (static_cast<int>(x.size()) != mlp.in_dim()) {
    throw std::invalid_argument("forward_cached: input dim mismatch");
  }
  acts.input = x;
  acts.pre.resize(mlp.layers.size());
  acts.post.resize(mlp.layers.size());
  const Vector* cur = &acts.input;
  for (size_t l = 0; l < mlp.layers.size(); ++l) {
    affine(mlp.layers[l], *cur, acts.pre[l]);
    acts.post[l] = acts.pre[l];
    if (mlp.layers[l].act == Activation::relu) {
      for (double& v : acts.post[l]) v = v > 0.0 ? v : 0.0;
    }
    cur = &acts.post[l];
  }
  return acts.post.back();
}

MlpGradients MlpGradients::zeros_like(const Mlp& mlp) {
  MlpGradients g;
  for (const Layer& layer : mlp.layers) {
    g.dw.emplace_back(layer.w.rows, layer.w.cols);
    g.db.emplace_back(layer.b.size(), 0.0);
  }
  g.dinput.assign(mlp.in_dim(), 0.0);
  return g;
}

Vector backward_accumulate(const Mlp& mlp, const MlpActivations& acts, const Vector& upstream,
                           MlpGradients& acc) {
  const int layers = static_cast<int>(mlp.layers.size());
  if (static_cast<int>(upstream.size()) != mlp.out_dim()) {
    throw std::invalid_argument("backward: upstream dim mismatch");
  }
  Vector delta = upstream, prev_delta;
  for (int l = layers - 1; l >= 0; --l) {
    const Layer& layer = mlp.layers[l];
    if (layer.act == Activation::relu) {
      for (size_t i = 0; i < delta.size(); ++i) {
        if (acts.pre[l][i] <= 0.0) delta[i] = 0.0;
      }
    }
    const Vector& input = (l == 0) ? acts.input : acts.post[l - 1];
    Matrix& dw = acc.dw[l];
    Vector& db = acc.db[l];
    for (int i = 0; i < layer.w.rows; ++i) {
      const double di = delta[i];
      db[i] += di;
      if (di == 0.0) continue;
      double* drow = &dw.data[static_cast<size_t>(i) * dw.cols];
      for (int j = 0; j < layer.w.cols; ++j) drow[j] += di * input[j];
    }
    prev_delta.assign(layer.w.cols, 0.0);
    for (int i = 0; i < layer.w.rows; ++i) {
      const double di = delta[i];
      if (di == 0.0) continue;
      const double* wrow = &layer.w.data[static_cast<size_t>(i) * layer.w.cols];
      for (int j = 0; j < layer.w.cols; ++j) prev_delta[j] += di * wrow[j];
    }
    delta.swap(prev_delta);
  }
  for (size_t j = 0; j < delta.size(); ++j) acc.dinput[j] += delta[j];
  return delta;
}

MlpGradients backward(const Mlp& mlp, const MlpActivations& acts, const Vector& upstream) {
  MlpGradients g = MlpGradients::zeros_like(mlp);
  g.dinput.assign(mlp.in_dim(), 0.0);
  Vector din = backward_accumulate(mlp, acts, upstream, g);
  g.dinput = din;
  return g;
}

std::pair<Matrix, Vector> fold_batchnorm(const Matrix& w, const Vector& b,
                                         const BatchNormParams& bn) {
  const int channels = w.rows;
  if (static_cast<int>(b.size()) != channels || static_cast<int>(bn.gamma.size()) != channels ||
      static_cast<int>(bn.beta.size()) != channels || static_cast<int>(bn.mean.size()) != channels ||
      static_cast<int>(bn.var.size()) != channels) {
    throw std::invalid_argument("fold_batchnorm: channel count mismatch");
  }
  Matrix wf(w.rows, w.cols);
  Vector bf(channels);
  for (int i = 0; i < channels; ++i) {
    const double denom = bn.var[i] + bn.eps;
    if (denom <= 0.0) throw std::invalid_argument("fold_batchnorm: var + eps must be positive");
    const double scale = bn.gamma[i] / std::sqrt(denom);
    for (int j = 0; j < w.cols; ++j) wf(i, j) = scale * w(i, j);
    bf[i] = scale * (b[i] - bn.mean[i]) + bn.beta[i];
  }
  return {std::move(wf), std::move(bf)};
}

Lut tabulate(const Mlp& mlp, const Lattice3& lattice, int threads) {
  if (mlp.in_dim() != 3) throw std::invalid_argument("tabulate: embedding input dim must be 3");
  Lut lut(lattice, mlp.out_dim());
  const auto fill_slabs = [&](int first_ix, int stride) {
    Vector x(3);
    for (int ix = first_ix; ix < lattice.d; ix += stride) {
      for (int iy = 0; iy < lattice.d; ++iy) {
        for (int iz = 0; iz < lattice.d; ++iz) {
          const Vec3 p = lattice.node_position(ix, iy, iz);
          x[0] = p[0];
          x[1] = p[1];
          x[2] = p[2];
          const Vector z = forward(mlp, x);
          float* slot = lut.node(lattice.node_index(ix, iy, iz));
          for (int c = 0; c < lut.k; ++c) slot[c] = static_cast<float>(z[c]);
        }
      }
    }
  };
  const int workers = std::max(1, std::min(threads, lattice.d));
  if (workers == 1) {
    fill_slabs(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(fill_slabs, w, workers);
    for (std::thread& t : pool) t.join();
  }
  return lut;
}

}  // namespace luti
