#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "luti/dataio.hpp"

using namespace luti;
namespace fs = std::filesystem;

namespace {

const fs::path kWorkDir = fs::temp_directory_path() / "luti_cli_tests";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LUTI_CLI_PATH) + " " + args + " >" +
                          (kWorkDir / "stdout.txt").string() + " 2>" +
                          (kWorkDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string captured_stdout() { return read_file(kWorkDir / "stdout.txt"); }
std::string captured_stderr() { return read_file(kWorkDir / "stderr.txt"); }

struct WorkDirSetup {
  WorkDirSetup() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);
  }
} setup;

std::string quick_train_args(const std::string& out, const std::string& metrics,
                             const std::string& extra = "--epochs 2") {
  return "train --variant luti_mlp_e2e --d 8 --k 12 --hidden 12,12 --per-class 6 "
         "--test-per-class 4 --points 64 --seed 9 --out " +
         out + " --metrics " + metrics + " " + extra;
}

}  // namespace

TEST_CASE("train writes a checkpoint and a metrics CSV") {
  const std::string ckpt = (kWorkDir / "smoke.ckpt").string();
  const std::string csv = (kWorkDir / "smoke.csv").string();
  REQUIRE(run_cli(quick_train_args(ckpt, csv)) == 0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(csv));

  const std::string metrics = read_file(csv);
  CHECK(metrics.find("epoch,loss,train_accuracy,test_accuracy") == 0);
  // one header plus one row per epoch
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 3);

  const Model model = load_checkpoint(ckpt);
  CHECK(model.variant == Variant::luti_mlp_e2e);
  CHECK(model.lattice.d == 8);
}

TEST_CASE("zero learning rate reproduces the init checkpoint") {
  const std::string frozen = (kWorkDir / "frozen.ckpt").string();
  const std::string init = (kWorkDir / "init.ckpt").string();
  REQUIRE(run_cli(quick_train_args(frozen, (kWorkDir / "m1.csv").string(), "--epochs 2 --lr 0")) == 0);
  REQUIRE(run_cli(quick_train_args(init, (kWorkDir / "m2.csv").string(), "--epochs 0")) == 0);
  CHECK(read_file(frozen) == read_file(init));
}

TEST_CASE("training twice with one seed is byte-reproducible") {
  const std::string csv1 = (kWorkDir / "rep1.csv").string();
  const std::string csv2 = (kWorkDir / "rep2.csv").string();
  REQUIRE(run_cli(quick_train_args((kWorkDir / "rep1.ckpt").string(), csv1)) == 0);
  REQUIRE(run_cli(quick_train_args((kWorkDir / "rep2.ckpt").string(), csv2)) == 0);
  CHECK(read_file(csv1) == read_file(csv2));
  CHECK(read_file((kWorkDir / "rep1.ckpt").string()) == read_file((kWorkDir / "rep2.ckpt").string()));
}

TEST_CASE("unknown variant is a usage error") {
  CHECK(run_cli("train --variant nope --epochs 1") == 1);
  CHECK(captured_stderr().find("unknown variant") != std::string::npos);
}

TEST_CASE("export-lut then inspect-lut expose node values") {
  const std::string ckpt = (kWorkDir / "exp.ckpt").string();
  REQUIRE(run_cli(quick_train_args(ckpt, (kWorkDir / "exp.csv").string())) == 0);

  const std::string lut_path = (kWorkDir / "exp.lut").string();
  REQUIRE(run_cli("export-lut --checkpoint " + ckpt + " --d 6 --out " + lut_path) == 0);
  const Lut lut = read_lut(lut_path);
  CHECK(lut.lattice.d == 6);
  CHECK(lut.k == 12);
  CHECK(fs::file_size(lut_path) - 40 == lut_size_bytes(6, 3, 12));

  // Exported node values equal the checkpoint MLP evaluated at the nodes.
  const Model model = load_checkpoint(ckpt);
  const Lattice3 lat = lut.lattice;
  for (int ix = 0; ix < 6; ix += 2)
    for (int iy = 0; iy < 6; iy += 3)
      for (int iz = 0; iz < 6; iz += 3) {
        const Vector z = forward(model.embed_mlp, lat.node_position(ix, iy, iz));
        const float* slot = lut.node(lat.node_index(ix, iy, iz));
        for (int c = 0; c < lut.k; ++c) CHECK(slot[c] == static_cast<float>(z[c]));
      }

  const std::string slice = (kWorkDir / "slice.csv").string();
  REQUIRE(run_cli("inspect-lut --lut " + lut_path + " --channel 3 --z 0 --out " + slice) == 0);
  const std::string csv = read_file(slice);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  std::istringstream first_line(csv.substr(0, csv.find('\n')));
  std::string cell;
  int cols = 0;
  while (std::getline(first_line, cell, ',')) ++cols;
  CHECK(cols == 6);

  CHECK(run_cli("inspect-lut --lut " + lut_path + " --channel 99") == 1);
  CHECK(captured_stderr().find("channel out of range") != std::string::npos);
}

TEST_CASE("register aligns a synthetic pair from the CLI") {
  const std::string pair_dir = (kWorkDir / "pair").string();
  REQUIRE(run_cli("synth --pair --classes torus --points 256 --seed 21 --out-dir " + pair_dir) == 0);
  const std::string ckpt = (kWorkDir / "reg.ckpt").string();
  REQUIRE(run_cli("train --variant luti_mlp_e2e --d 8 --k 32 --hidden 32,32 --epochs 0 "
                  "--per-class 2 --test-per-class 2 --points 64 --seed 9 --out " +
                  ckpt + " --metrics " + (kWorkDir / "reg.csv").string()) == 0);

  const std::string base = " --source " + pair_dir + "/source.xyz --target " + pair_dir +
                           "/target.xyz --checkpoint " + ckpt + " --ground-truth " + pair_dir +
                           "/ground_truth.txt";
  REQUIRE(run_cli("register" + base + " --jacobian canonical") == 0);
  const std::string canonical_out = captured_stdout();
  CHECK(canonical_out.find("estimated G") != std::string::npos);
  CHECK(canonical_out.find("residual norms") != std::string::npos);

  auto metric_after = [](const std::string& text, const std::string& key) {
    const size_t pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size()));
  };
  const double rot_canonical = metric_after(canonical_out, "rotation error ");
  CHECK(rot_canonical < 1.0);
  CHECK(metric_after(canonical_out, "translation error ") < 0.01);

  REQUIRE(run_cli("register" + base + " --jacobian approx") == 0);
  const double rot_approx = metric_after(captured_stdout(), "rotation error ");
  CHECK(std::abs(rot_approx - rot_canonical) < 0.5);

  CHECK(run_cli("register --source missing.xyz --target also_missing.xyz --checkpoint " + ckpt) == 1);
}

TEST_CASE("identical source and target register to the identity") {
  const std::string pair_dir = (kWorkDir / "pair_id").string();
  REQUIRE(run_cli("synth --pair --classes cube --points 128 --seed 23 --out-dir " + pair_dir) == 0);
  const std::string ckpt = (kWorkDir / "reg_id.ckpt").string();
  REQUIRE(run_cli("train --variant luti_mlp_e2e --d 8 --k 32 --hidden 32,32 --epochs 0 "
                  "--per-class 2 --test-per-class 2 --points 64 --seed 9 --out " +
                  ckpt + " --metrics " + (kWorkDir / "reg_id.csv").string()) == 0);
  REQUIRE(run_cli("register --source " + pair_dir + "/source.xyz --target " + pair_dir +
                  "/source.xyz --checkpoint " + ckpt) == 0);
  const std::string out = captured_stdout();
  CHECK(out.find("(converged)") != std::string::npos);
  CHECK(out.find("iterations 1") != std::string::npos);
}

TEST_CASE("warm starting from a checkpoint adopts its parameters") {
  const std::string donor = (kWorkDir / "donor.ckpt").string();
  REQUIRE(run_cli(quick_train_args(donor, (kWorkDir / "donor.csv").string())) == 0);
  const std::string warm = (kWorkDir / "warm.ckpt").string();
  REQUIRE(run_cli(quick_train_args(warm, (kWorkDir / "warm.csv").string(),
                                   "--epochs 1 --lr 0 --init-from " + donor)) == 0);
  const Model a = load_checkpoint(donor);
  const Model b = load_checkpoint(warm);
  REQUIRE(a.embed_mlp.layers.size() == b.embed_mlp.layers.size());
  for (size_t l = 0; l < a.embed_mlp.layers.size(); ++l)
    for (size_t i = 0; i < a.embed_mlp.layers[l].w.data.size(); ++i)
      CHECK(a.embed_mlp.layers[l].w.data[i] == b.embed_mlp.layers[l].w.data[i]);
}

TEST_CASE("export-lut payload sizes follow the 4 d^3 k accounting") {
  const std::string ckpt = (kWorkDir / "wide.ckpt").string();
  REQUIRE(run_cli("train --variant luti_mlp_e2e --d 8 --k 1024 --hidden 8 --epochs 0 "
                  "--per-class 2 --test-per-class 2 --points 32 --seed 5 --out " +
                  ckpt + " --metrics " + (kWorkDir / "wide.csv").string()) == 0);
  const std::string lut_path = (kWorkDir / "wide.lut").string();
  REQUIRE(run_cli("export-lut --checkpoint " + ckpt + " --d 8 --out " + lut_path) == 0);
  CHECK(fs::file_size(lut_path) - 40 == 2097152u);  // 2.00 MB payload
}

TEST_CASE("bench emits one row per method and lattice size") {
  const std::string csv_path = (kWorkDir / "bench.csv").string();
  REQUIRE(run_cli("bench --points 40 --d 4,8 --k 8 --hidden 8 --repeats 3 --warmup 1 --csv " +
                  csv_path) == 0);
  const std::string csv = read_file(csv_path);
  CHECK(csv.find("mlp_forward,inf") != std::string::npos);
  CHECK(csv.find("luti_forward,4") != std::string::npos);
  CHECK(csv.find("luti_forward,8") != std::string::npos);
  CHECK(csv.find("approx_jacobian_mlp,inf") != std::string::npos);
  CHECK(csv.find("approx_jacobian_luti,4") != std::string::npos);
  CHECK(csv.find("canonical_jacobian_mlp,inf") != std::string::npos);
  CHECK(csv.find("canonical_jacobian_luti,8") != std::string::npos);
  // header + 3 mlp rows + 3 rows per lattice size
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(captured_stdout().find("speedup vs MLP backend") != std::string::npos);
}

TEST_CASE("synth writes class directories loadable for training") {
  const std::string data_dir = (kWorkDir / "data").string();
  REQUIRE(run_cli("synth --classes sphere,cube --per-class 5 --points 64 --seed 25 --out-dir " +
                  data_dir) == 0);
  CHECK(fs::exists(fs::path(data_dir) / "sphere" / "sphere_0.xyz"));
  REQUIRE(run_cli("train --variant mlp --k 8 --hidden 8 --epochs 1 --points 64 --data " + data_dir +
                  " --out " + (kWorkDir / "dir.ckpt").string() + " --metrics " +
                  (kWorkDir / "dir.csv").string()) == 0);
  const Model model = load_checkpoint((kWorkDir / "dir.ckpt").string());
  CHECK(model.head.layers.back().w.rows == 2);  // two classes discovered
}
