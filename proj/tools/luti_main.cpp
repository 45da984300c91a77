// Command-line surface for the LUTI embedding engine: training, benchmarks,
// registration, table export/inspection and synthetic data generation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "luti/bench.hpp"
#include "luti/dataio.hpp"
#include "luti/embedder.hpp"
#include "luti/registration.hpp"
#include "luti/training.hpp"

namespace {

using namespace luti;

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated integer list");
  return out;
}

std::vector<Shape> parse_shapes(const std::string& csv) {
  std::vector<Shape> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(shape_from_name(item));
  }
  return out;
}

struct TrainCli {
  std::string variant = "luti_mlp_e2e";
  int d = 8;
  int k = 64;
  int epochs = 30;
  int batch = 16;
  double lr = 1e-3;
  uint64_t seed = 1;
  bool tv = false;
  double tv_weight = 1.0;
  int tv_p = 2;
  std::string data = "synth";
  std::string classes = "sphere,cube,cylinder,torus";
  int per_class = 50;
  int test_per_class = 20;
  int points = 128;
  std::string hidden = "32,32,64";
  int head_hidden = 32;
  bool no_augment = false;
  std::string init_from;
  std::string out = "model.ckpt";
  std::string metrics = "metrics.csv";
};

TrainConfig to_config(const TrainCli& cli, int classes) {
  TrainConfig cfg;
  cfg.variant = variant_from_name(cli.variant);
  cfg.d = cli.d;
  cfg.k = cli.k;
  cfg.epochs = cli.epochs;
  cfg.batch_size = cli.batch;
  cfg.lr = cli.lr;
  cfg.seed = cli.seed;
  cfg.tv_weight = cli.tv ? cli.tv_weight : 0.0;
  cfg.tv_p = cli.tv_p;
  cfg.hidden = parse_int_list(cli.hidden);
  cfg.head_hidden = cli.head_hidden;
  cfg.classes = classes;
  cfg.augment = !cli.no_augment;
  return cfg;
}

int cmd_train(const TrainCli& cli) {
  std::vector<PointCloud> train_set, test_set;
  std::vector<std::string> class_names;
  if (cli.data == "synth") {
    const std::vector<Shape> shapes = parse_shapes(cli.classes);
    for (Shape s : shapes) class_names.push_back(shape_name(s));
    train_set = synth_dataset(shapes, cli.per_class, cli.points, cli.seed);
    test_set = synth_dataset(shapes, cli.test_per_class, cli.points, cli.seed + 0x7065);
  } else {
    std::vector<PointCloud> all = load_directory_dataset(cli.data, cli.points, cli.seed, class_names);
    // Per-class 80/20 split, deterministic by file order.
    std::vector<int> seen(class_names.size(), 0);
    std::vector<int> totals(class_names.size(), 0);
    for (const PointCloud& c : all) totals[*c.label]++;
    for (PointCloud& c : all) {
      const int idx = seen[*c.label]++;
      if (idx < (totals[*c.label] * 4 + 4) / 5) {
        train_set.push_back(std::move(c));
      } else {
        test_set.push_back(std::move(c));
      }
    }
    if (test_set.empty()) test_set = train_set;
  }

  TrainConfig cfg = to_config(cli, static_cast<int>(class_names.size()));
  Model model = init_model(cfg);
  if (!cli.init_from.empty()) {
    // Warm start from an MLP-backed checkpoint.
    const Model donor = load_checkpoint(cli.init_from);
    if (!donor.uses_mlp() || !model.uses_mlp()) {
      throw std::runtime_error("--init-from needs MLP-backed checkpoints on both sides");
    }
    if (donor.k != model.k || donor.head.out_dim() != model.head.out_dim()) {
      throw std::runtime_error("--init-from checkpoint disagrees on k or class count");
    }
    model.embed_mlp = donor.embed_mlp;
    model.head = donor.head;
  }
  std::mt19937_64 rng(cfg.seed);

  std::ofstream metrics(cli.metrics);
  if (!metrics) throw std::runtime_error("cannot open " + cli.metrics + " for writing");
  metrics << "epoch,loss,train_accuracy,test_accuracy\n";
  metrics.precision(10);

  double test_acc = evaluate(model, test_set);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const EpochStats stats = train_epoch(model, train_set, cfg, epoch, rng);
    test_acc = evaluate(model, test_set);
    metrics << epoch << "," << stats.loss << "," << stats.train_accuracy << "," << test_acc << "\n";
    std::cout << "epoch " << epoch << "  loss " << stats.loss << "  train_acc "
              << stats.train_accuracy << "  test_acc " << test_acc << "\n";
  }
  save_checkpoint(cli.out, model);
  std::cout << "wrote " << cli.out << " and " << cli.metrics << "; final test accuracy "
            << test_acc << "\n";
  return 0;
}

int cmd_classify(const std::string& checkpoint, const std::string& input, bool no_normalize) {
  const Model model = load_checkpoint(checkpoint);
  PointCloud cloud = read_xyz(input);
  if (!no_normalize) cloud = normalize(cloud);
  const Lut table = model.variant == Variant::mlp ? Lut{} : model.to_lut();
  const Vector scores =
      classify_scores(model, model.variant == Variant::mlp ? nullptr : &table, cloud);
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  }
  std::cout << "class " << best << "\nscores";
  for (double s : scores) std::cout << " " << s;
  std::cout << "\n";
  return 0;
}

struct RegisterCli {
  std::string source, target;
  std::string lut_path, checkpoint;
  std::string backend = "luti";
  std::string jacobian = "canonical";
  int iters = 20;
  double t = 1e-2;
  double tol = 1e-7;
  double ridge = 1e-9;
  std::string ground_truth;
  int threads = 1;
};

int cmd_register(const RegisterCli& cli) {
  PointCloud source = read_xyz(cli.source);
  PointCloud target = read_xyz(cli.target);

  Lut lut;
  Model model;
  std::unique_ptr<Embedder> embedder;
  if (!cli.lut_path.empty()) {
    lut = read_lut(cli.lut_path);
    embedder = std::make_unique<LutEmbedder>(lut);
  } else if (!cli.checkpoint.empty()) {
    model = load_checkpoint(cli.checkpoint);
    if (cli.backend == "mlp") {
      if (!model.uses_mlp()) throw std::runtime_error("checkpoint has no MLP for the mlp backend");
      embedder = std::make_unique<MlpEmbedder>(model.embed_mlp);
    } else {
      lut = model.uses_mlp() ? tabulate(model.embed_mlp, model.lattice, cli.threads)
                             : model.to_lut();
      embedder = std::make_unique<LutEmbedder>(lut);
    }
  } else {
    throw std::runtime_error("register needs --lut or --checkpoint");
  }

  RegistrationConfig cfg;
  cfg.max_iters = cli.iters;
  cfg.perturbation = cli.t;
  cfg.step_tol = cli.tol;
  cfg.ridge = cli.ridge;
  cfg.jacobian_mode = cli.jacobian == "approx" ? JacobianMode::approx : JacobianMode::canonical;

  const RegistrationResult result = register_clouds(*embedder, source, target, cfg);

  std::cout.precision(9);
  std::cout << "estimated G (maps source onto target):\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) std::cout << (c ? " " : "") << result.g(r, c);
    std::cout << "\n";
  }
  std::cout << "iterations " << result.iterations << (result.converged ? " (converged)" : "")
            << "\nresidual norms";
  for (double r : result.residual_norms) std::cout << " " << r;
  std::cout << "\n";

  if (!cli.ground_truth.empty()) {
    std::ifstream gt(cli.ground_truth);
    if (!gt) throw std::runtime_error("cannot open " + cli.ground_truth);
    se3::RigidTransform truth;
    for (int i = 0; i < 16; ++i) {
      if (!(gt >> truth.m[i])) throw std::runtime_error(cli.ground_truth + ": expected 16 numbers");
    }
    const PoseError err = pose_error(result.g, truth);
    std::cout << "rotation error " << err.rotation_deg << " deg\ntranslation error "
              << err.translation << "\n";
  }
  return 0;
}

struct BenchCli {
  int points = 1000;
  std::string d_list = "4,8,16";
  int k = 128;
  std::string hidden = "64,64,128";
  int repeats = 30;
  int warmup = 3;
  uint64_t seed = 1;
  std::string csv = "bench.csv";
  int threads = 1;
};

int cmd_bench(const BenchCli& cli) {
  std::vector<int> dims{3};
  for (int h : parse_int_list(cli.hidden)) dims.push_back(h);
  dims.push_back(cli.k);
  const Mlp mlp = make_mlp(dims, cli.seed);
  const MlpEmbedder mlp_embedder(mlp);

  std::mt19937_64 rng(cli.seed + 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  PointCloud cloud;
  for (int i = 0; i < cli.points; ++i) cloud.points.push_back({unit(rng), unit(rng), unit(rng)});

  std::vector<bench::Row> rows;
  volatile double sink = 0.0;  // keeps the timed work observable

  const auto embed_all = [&](const Embedder& e) {
    double acc = 0.0;
    for (const Vec3& p : cloud.points) acc += e.embed(p)[0];
    sink = acc;
  };

  rows.push_back({"mlp_forward", "inf",
                  bench::time_fn([&] { embed_all(mlp_embedder); }, cli.repeats, cli.warmup)});

  const GlobalFeature mlp_feature = embed_aggregate(mlp_embedder, cloud);
  rows.push_back({"approx_jacobian_mlp", "inf", bench::time_fn([&] {
                    sink = approx_jacobian(mlp_embedder, cloud, 1e-2)(0, 0);
                  }, cli.repeats, cli.warmup)});
  rows.push_back({"canonical_jacobian_mlp", "inf", bench::time_fn([&] {
                    sink = canonical_jacobian(mlp_embedder, cloud, mlp_feature)(0, 0);
                  }, cli.repeats, cli.warmup)});

  for (int d : parse_int_list(cli.d_list)) {
    const Lut lut = tabulate(mlp, Lattice3(d), cli.threads);
    const LutEmbedder lut_embedder(lut);
    const std::string label = std::to_string(d);
    rows.push_back({"luti_forward", label,
                    bench::time_fn([&] { embed_all(lut_embedder); }, cli.repeats, cli.warmup)});
    const GlobalFeature lut_feature = embed_aggregate(lut_embedder, cloud);
    rows.push_back({"approx_jacobian_luti", label, bench::time_fn([&] {
                      sink = approx_jacobian(lut_embedder, cloud, 1e-2)(0, 0);
                    }, cli.repeats, cli.warmup)});
    rows.push_back({"canonical_jacobian_luti", label, bench::time_fn([&] {
                      sink = canonical_jacobian(lut_embedder, cloud, lut_feature)(0, 0);
                    }, cli.repeats, cli.warmup)});
  }
  (void)sink;

  std::cout << bench::to_table(rows);
  const auto median_of = [&](const std::string& method, const std::string& d) {
    for (const bench::Row& r : rows) {
      if (r.method == method && r.d == d) return r.timing.median_us;
    }
    return 0.0;
  };
  std::cout << "\nspeedup vs MLP backend (median):\n";
  for (int d : parse_int_list(cli.d_list)) {
    const std::string label = std::to_string(d);
    std::cout << "  d=" << label << "  embedding "
              << median_of("mlp_forward", "inf") / median_of("luti_forward", label)
              << "x  approx_jacobian "
              << median_of("approx_jacobian_mlp", "inf") / median_of("approx_jacobian_luti", label)
              << "x  canonical_jacobian "
              << median_of("canonical_jacobian_mlp", "inf") /
                     median_of("canonical_jacobian_luti", label)
              << "x\n";
  }

  std::ofstream csv(cli.csv);
  if (!csv) throw std::runtime_error("cannot open " + cli.csv + " for writing");
  csv << bench::to_csv(rows);
  std::cout << "\nwrote " << cli.csv << "\n";
  return 0;
}

int cmd_export_lut(const std::string& checkpoint, int d, const std::string& bounds,
                   const std::string& out, int threads) {
  Model model = load_checkpoint(checkpoint);
  Lattice3 lattice = model.lattice;
  if (d > 0) lattice = Lattice3(d, lattice.lo, lattice.hi);
  if (!bounds.empty()) {
    std::stringstream ss(bounds);
    std::string lo_s, hi_s;
    if (!std::getline(ss, lo_s, ',') || !std::getline(ss, hi_s, ',')) {
      throw std::invalid_argument("--bounds expects lo,hi");
    }
    const double lo = std::stod(lo_s), hi = std::stod(hi_s);
    lattice = Lattice3(lattice.d, {lo, lo, lo}, {hi, hi, hi});
  }
  Lut lut;
  if (model.uses_mlp()) {
    lut = tabulate(model.embed_mlp, lattice, threads);
  } else {
    if (d > 0 && d != model.lattice.d) {
      throw std::runtime_error("direct-table checkpoints cannot be re-tabulated at a new d");
    }
    lut = model.to_lut();
  }
  write_lut(out, lut);
  std::cout << "wrote " << out << " (" << lut.lattice.d << "^3 x " << lut.k << ", payload "
            << lut_size_bytes(lut.lattice.d, 3, lut.k) << " bytes)\n";
  return 0;
}

int cmd_inspect_lut(const std::string& path, int channel, double z, const std::string& out) {
  const Lut lut = read_lut(path);
  if (channel < 0 || channel >= lut.k) {
    throw std::invalid_argument("channel out of range: table has k = " + std::to_string(lut.k));
  }
  const Lattice3& lat = lut.lattice;
  const double zc = std::min(std::max(z, lat.lo[2]), lat.hi[2]);
  const int iz =
      static_cast<int>(std::lround((zc - lat.lo[2]) / (lat.hi[2] - lat.lo[2]) * (lat.d - 1)));

  std::ostringstream csv;
  csv.precision(9);
  for (int ix = 0; ix < lat.d; ++ix) {
    for (int iy = 0; iy < lat.d; ++iy) {
      csv << (iy ? "," : "") << lut.node(lat.node_index(ix, iy, iz))[channel];
    }
    csv << "\n";
  }
  if (out.empty() || out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out + " for writing");
    f << csv.str();
    std::cout << "wrote " << out << " (slice z index " << iz << ", channel " << channel << ")\n";
  }
  return 0;
}

struct SynthCli {
  std::string classes = "sphere,cube,cylinder,torus";
  int per_class = 10;
  int points = 256;
  uint64_t seed = 1;
  std::string out_dir = "synth_data";
  bool pair = false;
  double max_rot = 0.2;
  double max_trans = 0.1;
};

int cmd_synth(const SynthCli& cli) {
  namespace fs = std::filesystem;
  if (cli.pair) {
    // One source/target pair with a known rigid motion, for register demos.
    std::mt19937_64 rng(cli.seed);
    const std::vector<Shape> shapes = parse_shapes(cli.classes);
    PointCloud source = normalize(synth::shape_cloud(shapes.at(0), cli.points, rng));
    for (Vec3& p : source.points)
      for (int a = 0; a < 3; ++a) p[a] *= 0.85;

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vec3 axis{unit(rng), unit(rng), unit(rng)};
    const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    const double angle = cli.max_rot * mag(rng);
    se3::Twist xi{axis[0] / norm * angle, axis[1] / norm * angle, axis[2] / norm * angle,
                  cli.max_trans * unit(rng), cli.max_trans * unit(rng), cli.max_trans * unit(rng)};
    const se3::RigidTransform g = se3::exp(xi);

    fs::create_directories(cli.out_dir);
    write_xyz((fs::path(cli.out_dir) / "source.xyz").string(), source);
    write_xyz((fs::path(cli.out_dir) / "target.xyz").string(), se3::transform_cloud(g, source));
    std::ofstream gt(fs::path(cli.out_dir) / "ground_truth.txt");
    gt.precision(17);
    for (int i = 0; i < 16; ++i) gt << g.m[i] << (i % 4 == 3 ? "\n" : " ");
    std::cout << "wrote source.xyz, target.xyz, ground_truth.txt under " << cli.out_dir << "\n";
    return 0;
  }

  const std::vector<Shape> shapes = parse_shapes(cli.classes);
  std::mt19937_64 rng(cli.seed);
  for (Shape s : shapes) {
    const fs::path dir = fs::path(cli.out_dir) / shape_name(s);
    fs::create_directories(dir);
    for (int i = 0; i < cli.per_class; ++i) {
      const PointCloud cloud = normalize(synth::shape_cloud(s, cli.points, rng));
      std::ostringstream name;
      name << shape_name(s) << "_" << i << ".xyz";
      write_xyz((dir / name.str()).string(), cloud);
    }
  }
  std::cout << "wrote " << shapes.size() * cli.per_class << " clouds under " << cli.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LUTI point-feature embedding engine"};
  app.require_subcommand(1);

  TrainCli train;
  CLI::App* train_cmd = app.add_subcommand("train", "train a variant and write a checkpoint");
  train_cmd->add_option("--variant", train.variant,
                        "mlp | lut_mlp_approx | luti_mlp_approx | lut_mlp_e2e | luti_mlp_e2e | "
                        "lut_direct | luti_direct");
  train_cmd->add_option("--d", train.d, "lattice nodes per axis");
  train_cmd->add_option("--k", train.k, "embedding dimension");
  train_cmd->add_option("--epochs", train.epochs, "training epochs");
  train_cmd->add_option("--batch", train.batch, "batch size");
  train_cmd->add_option("--lr", train.lr, "learning rate");
  train_cmd->add_option("--seed", train.seed, "deterministic seed");
  train_cmd->add_flag("--tv", train.tv, "enable total-variation regularization (direct variants)");
  train_cmd->add_option("--tv-weight", train.tv_weight, "TV weight when --tv is set");
  train_cmd->add_option("--tv-p", train.tv_p, "TV norm exponent, 1 or 2");
  train_cmd->add_option("--data", train.data, "synth or a directory of class subfolders");
  train_cmd->add_option("--classes", train.classes, "synth classes (comma separated)");
  train_cmd->add_option("--per-class", train.per_class, "synth training clouds per class");
  train_cmd->add_option("--test-per-class", train.test_per_class, "synth test clouds per class");
  train_cmd->add_option("--points", train.points, "points per cloud");
  train_cmd->add_option("--hidden", train.hidden, "embedding hidden widths, comma separated");
  train_cmd->add_option("--head-hidden", train.head_hidden, "classifier hidden width");
  train_cmd->add_flag("--no-augment", train.no_augment, "disable rotation/jitter augmentation");
  train_cmd->add_option("--init-from", train.init_from, "warm-start parameters from a checkpoint");
  train_cmd->add_option("--out", train.out, "checkpoint path");
  train_cmd->add_option("--metrics", train.metrics, "per-epoch CSV path");

  std::string cls_checkpoint, cls_input;
  bool cls_no_normalize = false;
  CLI::App* classify_cmd = app.add_subcommand("classify", "classify an xyz cloud");
  classify_cmd->add_option("--checkpoint", cls_checkpoint, "model checkpoint")->required();
  classify_cmd->add_option("--input", cls_input, "xyz file")->required();
  classify_cmd->add_flag("--no-normalize", cls_no_normalize, "skip unit-cube normalization");

  RegisterCli reg;
  CLI::App* register_cmd = app.add_subcommand("register", "align two xyz clouds");
  register_cmd->add_option("--source", reg.source, "source xyz")->required();
  register_cmd->add_option("--target", reg.target, "target xyz")->required();
  register_cmd->add_option("--lut", reg.lut_path, "table file for the embedding");
  register_cmd->add_option("--checkpoint", reg.checkpoint, "checkpoint for the embedding");
  register_cmd->add_option("--backend", reg.backend, "luti | mlp (with --checkpoint)");
  register_cmd->add_option("--jacobian", reg.jacobian, "approx | canonical");
  register_cmd->add_option("--iters", reg.iters, "max iterations");
  register_cmd->add_option("--t", reg.t, "finite-difference perturbation (approx)");
  register_cmd->add_option("--tol", reg.tol, "step tolerance");
  register_cmd->add_option("--ridge", reg.ridge, "normal-equation ridge");
  register_cmd->add_option("--ground-truth", reg.ground_truth, "file with the true 4x4 transform");
  register_cmd->add_option("--threads", reg.threads, "worker cap");

  BenchCli bench_cli;
  CLI::App* bench_cmd = app.add_subcommand("bench", "embedding and Jacobian timing");
  bench_cmd->add_option("--points", bench_cli.points, "cloud size");
  bench_cmd->add_option("--d", bench_cli.d_list, "lattice sizes, comma separated");
  bench_cmd->add_option("--k", bench_cli.k, "embedding dimension");
  bench_cmd->add_option("--hidden", bench_cli.hidden, "MLP hidden widths");
  bench_cmd->add_option("--repeats", bench_cli.repeats, "timed repetitions");
  bench_cmd->add_option("--warmup", bench_cli.warmup, "discarded warm-up runs");
  bench_cmd->add_option("--seed", bench_cli.seed, "seed for the net and cloud");
  bench_cmd->add_option("--csv", bench_cli.csv, "output CSV path");
  bench_cmd->add_option("--threads", bench_cli.threads, "worker cap");

  std::string exp_checkpoint, exp_bounds, exp_out = "table.lut";
  int exp_d = 0, exp_threads = 1;
  CLI::App* export_cmd = app.add_subcommand("export-lut", "tabulate a checkpoint into a table file");
  export_cmd->add_option("--checkpoint", exp_checkpoint, "model checkpoint")->required();
  export_cmd->add_option("--d", exp_d, "override lattice nodes per axis");
  export_cmd->add_option("--bounds", exp_bounds, "cube bounds lo,hi");
  export_cmd->add_option("--out", exp_out, "output table path");
  export_cmd->add_option("--threads", exp_threads, "worker cap");

  std::string ins_path, ins_out;
  int ins_channel = 0;
  double ins_z = 0.0;
  CLI::App* inspect_cmd = app.add_subcommand("inspect-lut", "dump one channel of a z slice as CSV");
  inspect_cmd->add_option("--lut", ins_path, "table file")->required();
  inspect_cmd->add_option("--channel", ins_channel, "channel index");
  inspect_cmd->add_option("--z", ins_z, "world z of the slice (snapped to a node plane)");
  inspect_cmd->add_option("--out", ins_out, "CSV path (default stdout)");

  SynthCli synth_cli;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic datasets or a pose pair");
  synth_cmd->add_option("--classes", synth_cli.classes, "shape names, comma separated");
  synth_cmd->add_option("--per-class", synth_cli.per_class, "clouds per class");
  synth_cmd->add_option("--points", synth_cli.points, "points per cloud");
  synth_cmd->add_option("--seed", synth_cli.seed, "seed");
  synth_cmd->add_option("--out-dir", synth_cli.out_dir, "output directory");
  synth_cmd->add_flag("--pair", synth_cli.pair, "emit a source/target pair with ground truth");
  synth_cmd->add_option("--max-rot", synth_cli.max_rot, "pair: max rotation (rad)");
  synth_cmd->add_option("--max-trans", synth_cli.max_trans, "pair: max translation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*classify_cmd) return cmd_classify(cls_checkpoint, cls_input, cls_no_normalize);
    if (*register_cmd) return cmd_register(reg);
    if (*bench_cmd) return cmd_bench(bench_cli);
    if (*export_cmd) return cmd_export_lut(exp_checkpoint, exp_d, exp_bounds, exp_out, exp_threads);
    if (*inspect_cmd) return cmd_inspect_lut(ins_path, ins_channel, ins_z, ins_out);
    if (*synth_cmd) return cmd_synth(synth_cli);
  } catch (const std::invalid_argument& e) {
    std::cerr << "luti: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "luti: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "luti: internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
