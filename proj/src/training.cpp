#include "luti/training.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "luti/aggregate.hpp"
#include "luti/embedder.hpp"

namespace luti {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::mlp: return "mlp";
    case Variant::lut_mlp_approx: return "lut_mlp_approx";
    case Variant::luti_mlp_approx: return "luti_mlp_approx";
    case Variant::lut_mlp_e2e: return "lut_mlp_e2e";
    case Variant::luti_mlp_e2e: return "luti_mlp_e2e";
    case Variant::lut_direct: return "lut_direct";
    case Variant::luti_direct: return "luti_direct";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::mlp, Variant::lut_mlp_approx, Variant::luti_mlp_approx,
                    Variant::lut_mlp_e2e, Variant::luti_mlp_e2e, Variant::lut_direct,
                    Variant::luti_direct}) {
    if (name == variant_name(v)) return v;
  }
  throw std::invalid_argument("unknown variant: " + name);
}

void AdamOpt::step(double lr, const std::vector<std::pair<double*, size_t>>& blocks,
                   const std::vector<double>& grads) {
  size_t total = 0;
  for (const auto& [ptr, n] : blocks) total += n;
  if (grads.size() != total) throw std::invalid_argument("AdamOpt: gradient size mismatch");
  if (m.size() != total) {
    m.assign(total, 0.0);
    v.assign(total, 0.0);
    t = 0;
  }
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  size_t off = 0;
  for (const auto& [ptr, n] : blocks) {
    for (size_t i = 0; i < n; ++i, ++off) {
      const double g = grads[off];
      m[off] = beta1 * m[off] + (1.0 - beta1) * g;
      v[off] = beta2 * v[off] + (1.0 - beta2) * g * g;
      const double mhat = m[off] / bc1;
      const double vhat = v[off] / bc2;
      ptr[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

Lut Model::to_lut() const {
  if (uses_mlp()) return tabulate(embed_mlp, lattice);
  Lut lut(lattice, k);
  for (size_t i = 0; i < table.size(); ++i) lut.data[i] = static_cast<float>(table[i]);
  return lut;
}

Model init_model(const TrainConfig& cfg) {
  if (cfg.d < 2) throw std::invalid_argument("init_model: d must be >= 2");
  if (cfg.tv_weight < 0.0) throw std::invalid_argument("init_model: tv_weight must be >= 0");
  if (cfg.tv_p != 1 && cfg.tv_p != 2) throw std::invalid_argument("init_model: tv_p must be 1 or 2");
  if (cfg.classes < 2) throw std::invalid_argument("init_model: need at least 2 classes");
  Model model;
  model.variant = cfg.variant;
  model.k = cfg.k;
  model.lattice = Lattice3(cfg.d);
  if (model.uses_mlp()) {
    std::vector<int> dims{3};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(cfg.k);
    model.embed_mlp = make_mlp(dims, cfg.seed);
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(0.0, 0.01);
    model.table.resize(static_cast<size_t>(model.lattice.node_count()) * cfg.k);
    for (double& w : model.table) w = dist(rng);
  }
  model.head = make_mlp({cfg.k, cfg.head_hidden, cfg.classes}, cfg.seed ^ 0x517cc1b727220a95ULL);
  return model;
}

namespace {

double tv_sum(const Lattice3& lat, int k, const std::function<double(size_t)>& at, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("tv_regularizer: p must be 1 or 2");
  double total = 0.0;
  const int d = lat.d;
  const int strides[3] = {d * d, d, 1};
  for (int ix = 0; ix < d; ++ix) {
    for (int iy = 0; iy < d; ++iy) {
      for (int iz = 0; iz < d; ++iz) {
        const int node = lat.node_index(ix, iy, iz);
        const int idx[3] = {ix, iy, iz};
        for (int axis = 0; axis < 3; ++axis) {
          if (idx[axis] + 1 >= d) continue;
          const int nb = node + strides[axis];
          for (int c = 0; c < k; ++c) {
            const double diff = at(static_cast<size_t>(node) * k + c) - at(static_cast<size_t>(nb) * k + c);
            total += p == 1 ? std::abs(diff) : diff * diff;
          }
        }
      }
    }
  }
  return total;
}

}  // namespace

double tv_regularizer(const Lut& table, int p) {
  return tv_sum(table.lattice, table.k,
                [&](size_t i) { return static_cast<double>(table.data[i]); }, p);
}

double tv_regularizer_raw(const Lattice3& lattice, int k, const std::vector<double>& table, int p) {
  if (table.size() != static_cast<size_t>(lattice.node_count()) * k) {
    throw std::invalid_argument("tv_regularizer_raw: table size mismatch");
  }
  return tv_sum(lattice, k, [&](size_t i) { return table[i]; }, p);
}

namespace {

void add_tv_gradient(const Lattice3& lat, int k, const std::vector<double>& table, int p,
                     double weight, std::vector<double>& grad) {
  const int d = lat.d;
  const int strides[3] = {d * d, d, 1};
  for (int ix = 0; ix < d; ++ix) {
    for (int iy = 0; iy < d; ++iy) {
      for (int iz = 0; iz < d; ++iz) {
        const int node = lat.node_index(ix, iy, iz);
        const int idx[3] = {ix, iy, iz};
        for (int axis = 0; axis < 3; ++axis) {
          if (idx[axis] + 1 >= d) continue;
          const int nb = node + strides[axis];
          for (int c = 0; c < k; ++c) {
            const size_t a = static_cast<size_t>(node) * k + c;
            const size_t b = static_cast<size_t>(nb) * k + c;
            const double diff = table[a] - table[b];
            const double g = p == 1 ? (diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0) : 2.0 * diff;
            grad[a] += weight * g;
            grad[b] -= weight * g;
          }
        }
      }
    }
  }
}

struct CrossEntropy {
  double loss;
  Vector dlogits;
  int predicted;
};

CrossEntropy cross_entropy(const Vector& logits, int label) {
  const int c = static_cast<int>(logits.size());
  if (label < 0 || label >= c) throw std::invalid_argument("cross_entropy: label out of range");
  double mx = logits[0];
  int arg = 0;
  for (int i = 1; i < c; ++i) {
    if (logits[i] > mx) {
      mx = logits[i];
      arg = i;
    }
  }
  double sum = 0.0;
  for (int i = 0; i < c; ++i) sum += std::exp(logits[i] - mx);
  const double lse = mx + std::log(sum);
  CrossEntropy ce;
  ce.loss = lse - logits[label];
  ce.predicted = arg;
  ce.dlogits.resize(c);
  for (int i = 0; i < c; ++i) {
    ce.dlogits[i] = std::exp(logits[i] - mx) / sum - (i == label ? 1.0 : 0.0);
  }
  return ce;
}

// Per-point embeddings along the training path. Corner evaluations of the
// interpolated variants are cached per distinct node going through
// `node_values`; the accumulation order matches interpolate() so the
// training forward and the tabulated forward agree bitwise.
Matrix embed_batch_cloud(const Model& model, const TrainConfig& cfg, const PointCloud& cloud,
                         std::map<int, Vector>& node_values, std::vector<CellQuery>& queries) {
  const int n = cloud.size(), k = model.k;
  Matrix z(n, k);
  queries.clear();
  auto node_value = [&](int node) -> const Vector& {
    auto it = node_values.find(node);
    if (it == node_values.end()) {
      const int d = model.lattice.d;
      const int ix = node / (d * d), iy = (node / d) % d, iz = node % d;
      const Vec3 p = model.lattice.node_position(ix, iy, iz);
      it = node_values.emplace(node, forward(model.embed_mlp, p)).first;
    }
    return it->second;
  };
  switch (model.variant) {
    case Variant::mlp:
    case Variant::lut_mlp_approx:
    case Variant::luti_mlp_approx: {
      for (int i = 0; i < n; ++i) {
        const Vector zi = forward(model.embed_mlp, cloud.points[i]);
        for (int c = 0; c < k; ++c) z(i, c) = zi[c];
      }
      break;
    }
    case Variant::luti_mlp_e2e: {
      for (int i = 0; i < n; ++i) {
        const CellQuery q = locate(model.lattice, cloud.points[i]);
        queries.push_back(q);
        double* row = &z.data[static_cast<size_t>(i) * k];
        for (int j = 0; j < 8; ++j) {
          const double w = q.weights[j];
          const Vector& val = node_value(q.corners[j]);
          if (cfg.quantize_corners) {
            for (int c = 0; c < k; ++c) row[c] += w * static_cast<double>(static_cast<float>(val[c]));
          } else {
            for (int c = 0; c < k; ++c) row[c] += w * val[c];
          }
        }
      }
      break;
    }
    case Variant::lut_mlp_e2e: {
      for (int i = 0; i < n; ++i) {
        const int node = nearest_node(model.lattice, cloud.points[i]);
        CellQuery q{};
        q.corners[0] = node;  // backward routes everything to this node
        queries.push_back(q);
        const Vector& val = node_value(node);
        double* row = &z.data[static_cast<size_t>(i) * k];
        if (cfg.quantize_corners) {
          for (int c = 0; c < k; ++c) row[c] = static_cast<double>(static_cast<float>(val[c]));
        } else {
          for (int c = 0; c < k; ++c) row[c] = val[c];
        }
      }
      break;
    }
    case Variant::lut_direct: {
      for (int i = 0; i < n; ++i) {
        const int node = nearest_node(model.lattice, cloud.points[i]);
        CellQuery q{};
        q.corners[0] = node;
        queries.push_back(q);
        const double* row = &model.table[static_cast<size_t>(node) * k];
        for (int c = 0; c < k; ++c) z(i, c) = row[c];
      }
      break;
    }
    case Variant::luti_direct: {
      for (int i = 0; i < n; ++i) {
        const CellQuery q = locate(model.lattice, cloud.points[i]);
        queries.push_back(q);
        double* row = &z.data[static_cast<size_t>(i) * k];
        for (int j = 0; j < 8; ++j) {
          const double w = q.weights[j];
          const double* val = &model.table[static_cast<size_t>(q.corners[j]) * k];
          for (int c = 0; c < k; ++c) row[c] += w * val[c];
        }
      }
      break;
    }
  }
  return z;
}

struct ParamBlocks {
  std::vector<std::pair<double*, size_t>> blocks;
  size_t total = 0;

  void add(double* p, size_t n) {
    blocks.emplace_back(p, n);
    total += n;
  }
};

ParamBlocks collect_params(Model& model) {
  ParamBlocks pb;
  if (model.uses_mlp()) {
    for (Layer& layer : model.embed_mlp.layers) {
      pb.add(layer.w.data.data(), layer.w.data.size());
      pb.add(layer.b.data(), layer.b.size());
    }
  } else {
    pb.add(model.table.data(), model.table.size());
  }
  for (Layer& layer : model.head.layers) {
    pb.add(layer.w.data.data(), layer.w.data.size());
    pb.add(layer.b.data(), layer.b.size());
  }
  return pb;
}

void flatten_grads(const Model& model, const MlpGradients& embed_g,
                   const std::vector<double>& table_g, const MlpGradients& head_g,
                   std::vector<double>& out) {
  out.clear();
  if (model.uses_mlp()) {
    for (size_t l = 0; l < embed_g.dw.size(); ++l) {
      out.insert(out.end(), embed_g.dw[l].data.begin(), embed_g.dw[l].data.end());
      out.insert(out.end(), embed_g.db[l].begin(), embed_g.db[l].end());
    }
  } else {
    out.insert(out.end(), table_g.begin(), table_g.end());
  }
  for (size_t l = 0; l < head_g.dw.size(); ++l) {
    out.insert(out.end(), head_g.dw[l].data.begin(), head_g.dw[l].data.end());
    out.insert(out.end(), head_g.db[l].begin(), head_g.db[l].end());
  }
}

LossGrads compute_loss_grads(const Model& model, const std::vector<PointCloud>& batch,
                             const TrainConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  const int k = model.k;
  const bool direct = !model.uses_mlp();

  MlpGradients embed_grads =
      model.uses_mlp() ? MlpGradients::zeros_like(model.embed_mlp) : MlpGradients{};
  MlpGradients head_grads = MlpGradients::zeros_like(model.head);
  std::vector<double> table_grad(direct ? model.table.size() : 0, 0.0);
  std::map<int, Vector> node_values;    // shared across the batch
  std::map<int, Vector> node_upstream;  // e2e variants

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  int correct = 0;

  for (const PointCloud& cloud : batch) {
    if (!cloud.label) throw std::invalid_argument("train_step: unlabeled cloud in batch");
    if (cloud.points.empty()) throw std::invalid_argument("train_step: empty cloud in batch");

    std::vector<CellQuery> queries;
    const Matrix z = embed_batch_cloud(model, cfg, cloud, node_values, queries);
    const GlobalFeature gf = max_aggregate(z);

    MlpActivations head_acts;
    const Vector logits = forward_cached(model.head, gf.a, head_acts);
    const CrossEntropy ce = cross_entropy(logits, *cloud.label);
    loss += ce.loss * inv_b;
    if (ce.predicted == *cloud.label) ++correct;

    Vector dlogits = ce.dlogits;
    for (double& g : dlogits) g *= inv_b;
    const Vector da = backward_accumulate(model.head, head_acts, dlogits, head_grads);

    // Route the global-feature gradient to each channel's argmax point.
    std::map<int, Vector> point_upstream;
    for (int c = 0; c < k; ++c) {
      if (da[c] == 0.0) continue;
      auto [it, fresh] = point_upstream.try_emplace(gf.argmax[c], Vector(k, 0.0));
      it->second[c] += da[c];
    }

    for (const auto& [pi, upstream] : point_upstream) {
      switch (model.variant) {
        case Variant::mlp:
        case Variant::lut_mlp_approx:
        case Variant::luti_mlp_approx: {
          MlpActivations acts;
          forward_cached(model.embed_mlp, Vector{cloud.points[pi][0], cloud.points[pi][1],
                                                 cloud.points[pi][2]},
                         acts);
          backward_accumulate(model.embed_mlp, acts, upstream, embed_grads);
          break;
        }
        case Variant::luti_mlp_e2e: {
          const CellQuery& q = queries[pi];
          for (int j = 0; j < 8; ++j) {
            if (q.weights[j] == 0.0) continue;
            auto [it, fresh] = node_upstream.try_emplace(q.corners[j], Vector(k, 0.0));
            for (int c = 0; c < k; ++c) it->second[c] += q.weights[j] * upstream[c];
          }
          break;
        }
        case Variant::lut_mlp_e2e: {
          auto [it, fresh] = node_upstream.try_emplace(queries[pi].corners[0], Vector(k, 0.0));
          for (int c = 0; c < k; ++c) it->second[c] += upstream[c];
          break;
        }
        case Variant::lut_direct: {
          double* slot = &table_grad[static_cast<size_t>(queries[pi].corners[0]) * k];
          for (int c = 0; c < k; ++c) slot[c] += upstream[c];
          break;
        }
        case Variant::luti_direct: {
          LutGrad grad_view;
          grad_view.lattice = model.lattice;
          grad_view.k = k;
          grad_view.data.swap(table_grad);
          scatter_gradient(grad_view, queries[pi], upstream);
          table_grad.swap(grad_view.data);
          break;
        }
      }
    }
  }

  // Backpropagate the accumulated per-node gradients through the MLP once
  // per distinct node.
  if (!node_upstream.empty()) {
    for (const auto& [node, upstream] : node_upstream) {
      const int d = model.lattice.d;
      const Vec3 p = model.lattice.node_position(node / (d * d), (node / d) % d, node % d);
      MlpActivations acts;
      forward_cached(model.embed_mlp, Vector{p[0], p[1], p[2]}, acts);
      backward_accumulate(model.embed_mlp, acts, upstream, embed_grads);
    }
  }

  if (direct && cfg.tv_weight > 0.0) {
    loss += cfg.tv_weight * tv_regularizer_raw(model.lattice, k, model.table, cfg.tv_p);
    add_tv_gradient(model.lattice, k, model.table, cfg.tv_p, cfg.tv_weight, table_grad);
  }

  if (!std::isfinite(loss)) throw std::runtime_error("train_step: non-finite loss");

  LossGrads out;
  out.loss = loss;
  out.correct = correct;
  flatten_grads(model, embed_grads, table_grad, head_grads, out.grads);
  return out;
}

double step_batch(Model& model, const std::vector<PointCloud>& batch, const TrainConfig& cfg,
                  double lr, int* correct_out) {
  const LossGrads lg = compute_loss_grads(model, batch, cfg);
  ParamBlocks pb = collect_params(model);
  model.opt.step(lr, pb.blocks, lg.grads);
  if (correct_out) *correct_out = lg.correct;
  return lg.loss;
}

}  // namespace

LossGrads loss_and_gradients(const Model& model, const std::vector<PointCloud>& batch,
                             const TrainConfig& cfg) {
  return compute_loss_grads(model, batch, cfg);
}

std::vector<std::pair<double*, size_t>> parameter_blocks(Model& model) {
  return collect_params(model).blocks;
}

double train_step(Model& model, const std::vector<PointCloud>& batch, const TrainConfig& cfg) {
  return step_batch(model, batch, cfg, cfg.lr, nullptr);
}

double train_step_at_lr(Model& model, const std::vector<PointCloud>& batch,
                        const TrainConfig& cfg, double lr) {
  return step_batch(model, batch, cfg, lr, nullptr);
}

PointCloud augment_with(const PointCloud& cloud, double angle, double sigma,
                        std::mt19937_64& rng, const Lattice3& bounds) {
  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(cloud.points.size());
  const double c = std::cos(angle), s = std::sin(angle);
  std::normal_distribution<double> jitter(0.0, sigma > 0.0 ? sigma : 1.0);
  for (const Vec3& p : cloud.points) {
    Vec3 q{c * p[0] + s * p[2], p[1], -s * p[0] + c * p[2]};  // rotate about y (up)
    if (sigma > 0.0) {
      for (int a = 0; a < 3; ++a) q[a] += jitter(rng);
    }
    for (int a = 0; a < 3; ++a) q[a] = std::min(std::max(q[a], bounds.lo[a]), bounds.hi[a]);
    out.points.push_back(q);
  }
  return out;
}

PointCloud augment(const PointCloud& cloud, std::mt19937_64& rng, const Lattice3& bounds) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  return augment_with(cloud, angle(rng), 0.02, rng, bounds);
}

Vector classify_scores(const Model& model, const Lut* table, const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("classify: empty cloud");
  const int n = cloud.size(), k = model.k;
  Matrix z(n, k);
  switch (model.variant) {
    case Variant::mlp: {
      for (int i = 0; i < n; ++i) {
        const Vector zi = forward(model.embed_mlp, cloud.points[i]);
        for (int c = 0; c < k; ++c) z(i, c) = zi[c];
      }
      break;
    }
    case Variant::luti_mlp_approx:
    case Variant::luti_mlp_e2e:
    case Variant::luti_direct: {
      if (!table) throw std::invalid_argument("classify: table required for this variant");
      for (int i = 0; i < n; ++i) {
        const Vector zi = interpolate(*table, locate(table->lattice, cloud.points[i]));
        for (int c = 0; c < k; ++c) z(i, c) = zi[c];
      }
      break;
    }
    case Variant::lut_mlp_approx:
    case Variant::lut_mlp_e2e:
    case Variant::lut_direct: {
      if (!table) throw std::invalid_argument("classify: table required for this variant");
      for (int i = 0; i < n; ++i) {
        const float* row = table->node(nearest_node(table->lattice, cloud.points[i]));
        for (int c = 0; c < k; ++c) z(i, c) = static_cast<double>(row[c]);
      }
      break;
    }
  }
  const GlobalFeature gf = max_aggregate(z);
  return forward(model.head, gf.a);
}

int classify(const Model& model, const Lut* table, const PointCloud& cloud) {
  const Vector scores = classify_scores(model, table, cloud);
  int arg = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[arg]) arg = static_cast<int>(i);
  }
  return arg;
}

double evaluate(const Model& model, const std::vector<PointCloud>& dataset) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: empty dataset");
  Lut table;
  const bool needs_table = model.variant != Variant::mlp;
  if (needs_table) table = model.to_lut();
  int correct = 0;
  for (const PointCloud& cloud : dataset) {
    if (!cloud.label) throw std::invalid_argument("evaluate: unlabeled cloud");
    if (classify(model, needs_table ? &table : nullptr, cloud) == *cloud.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

EpochStats train_epoch(Model& model, const std::vector<PointCloud>& train_set,
                       const TrainConfig& cfg, int epoch, std::mt19937_64& rng) {
  if (train_set.empty()) throw std::invalid_argument("train_epoch: empty training set");
  std::vector<int> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::shuffle(order.begin(), order.end(), rng);

  const double lr =
      cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch / std::max(1, cfg.lr_decay_every)));

  EpochStats stats;
  int correct = 0, steps = 0;
  for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
    std::vector<PointCloud> batch;
    for (size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
      const PointCloud& c = train_set[order[i]];
      batch.push_back(cfg.augment ? augment(c, rng, model.lattice) : c);
    }
    int batch_correct = 0;
    stats.loss += step_batch(model, batch, cfg, lr, &batch_correct);
    correct += batch_correct;
    ++steps;
  }
  stats.loss /= std::max(1, steps);
  stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
  return stats;
}

}  // namespace luti
