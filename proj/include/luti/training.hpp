#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "luti/lattice.hpp"
#include "luti/mlp.hpp"
#include "luti/point_cloud.hpp"

namespace luti {

enum class Variant {
  mlp,             // per-point MLP baseline
  lut_mlp_approx,  // trained MLP tabulated post hoc, nearest-node lookup
  luti_mlp_approx, // trained MLP tabulated post hoc, trilinear interpolation
  lut_mlp_e2e,     // inputs snapped to the nearest node during training
  luti_mlp_e2e,    // interpolated corner evaluations during training
  lut_direct,      // table trained as raw parameters, nearest-node lookup
  luti_direct,     // table trained as raw parameters, interpolated
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct TrainConfig {
  Variant variant = Variant::luti_mlp_e2e;
  int d = 8;
  int k = 128;
  int epochs = 30;
  int batch_size = 16;
  double lr = 1e-3;
  double lr_decay = 0.5;            // multiplicative step decay
  int lr_decay_every = 20;          // epochs
  double tv_weight = 0.0;           // 0 disables; 1.0 is the usual setting
  int tv_p = 2;                     // {1, 2}
  uint64_t seed = 1;
  std::vector<int> hidden = {64, 64, 128};  // embedding widths between 3 and k
  int head_hidden = 32;             // classifier k -> head_hidden -> classes
  int classes = 4;
  bool augment = true;
  bool quantize_corners = true;     // cast corner evaluations to f32 so the
                                    // training forward matches the table path
                                    // bitwise; disable only for smooth
                                    // finite-difference checks
};

/// Adam with bias correction over concatenated parameter blocks.
struct AdamOpt {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<double> m;
  std::vector<double> v;

  void step(double lr, const std::vector<std::pair<double*, size_t>>& blocks,
            const std::vector<double>& grads);
};

/// Trainable state for every variant: an embedding MLP (MLP-backed
/// variants), a raw table (direct variants) and the classification head.
struct Model {
  Variant variant = Variant::mlp;
  int k = 0;
  Lattice3 lattice;
  Mlp embed_mlp;                    // empty for direct variants
  std::vector<double> table;        // d^3 * k, direct variants only
  Mlp head;                         // k -> h -> classes
  AdamOpt opt;

  bool uses_mlp() const { return variant != Variant::lut_direct && variant != Variant::luti_direct; }
  /// Test-time table: tabulated MLP or the cast raw table.
  Lut to_lut() const;
};

Model init_model(const TrainConfig& cfg);

/// Sum over axis-adjacent node pairs (each unordered pair once) of the
/// channel-wise |w_i - w_j|^p.
double tv_regularizer(const Lut& table, int p);
double tv_regularizer_raw(const Lattice3& lattice, int k, const std::vector<double>& table, int p);

/// Loss and flat gradient over the trainable parameters, in the same block
/// order the optimizer consumes (embedding layers or table, then head).
struct LossGrads {
  double loss = 0.0;
  std::vector<double> grads;
  int correct = 0;
};
LossGrads loss_and_gradients(const Model& model, const std::vector<PointCloud>& batch,
                             const TrainConfig& cfg);

/// Trainable parameter blocks in optimizer order.
std::vector<std::pair<double*, size_t>> parameter_blocks(Model& model);

/// One optimizer step on a batch: per-variant forward to class scores,
/// cross-entropy (plus tv_weight * TV for direct variants), backward,
/// Adam update. Returns the loss. Non-finite loss is an error.
double train_step(Model& model, const std::vector<PointCloud>& batch, const TrainConfig& cfg);

double train_step_at_lr(Model& model, const std::vector<PointCloud>& batch,
                        const TrainConfig& cfg, double lr);

/// Rotation by a uniform angle about the y (up) axis, Gaussian jitter with
/// the given sigma, then clamp to bounds.
PointCloud augment_with(const PointCloud& cloud, double angle, double sigma,
                        std::mt19937_64& rng, const Lattice3& bounds);
PointCloud augment(const PointCloud& cloud, std::mt19937_64& rng, const Lattice3& bounds);

/// Class scores for one cloud along the variant's test-time path. The table
/// is required for table-backed variants (pass to_lut() once per model).
Vector classify_scores(const Model& model, const Lut* table, const PointCloud& cloud);
int classify(const Model& model, const Lut* table, const PointCloud& cloud);

/// Fraction of argmax-correct predictions over a labeled dataset, without
/// augmentation. Empty dataset is an error.
double evaluate(const Model& model, const std::vector<PointCloud>& dataset);

struct EpochStats {
  double loss = 0.0;
  double train_accuracy = 0.0;
};

/// Shuffles, batches, augments (if configured) and steps through one epoch.
EpochStats train_epoch(Model& model, const std::vector<PointCloud>& train_set,
                       const TrainConfig& cfg, int epoch, std::mt19937_64& rng);

}  // namespace luti
