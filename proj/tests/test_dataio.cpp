#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "luti/dataio.hpp"

using namespace luti;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("normalize leaves a centered unit cloud unchanged") {
  PointCloud cloud;
  cloud.points = {{1.0, 0.5, -0.25}, {-1.0, -0.5, 0.25}};  // symmetric: centroid 0, max 1
  const PointCloud out = normalize(cloud);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 3; ++a) CHECK(out.points[i][a] == cloud.points[i][a]);
}

TEST_CASE("normalize maps a segment to [-1, 1]") {
  PointCloud cloud;
  cloud.points = {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};
  const PointCloud out = normalize(cloud);
  CHECK(out.points[0][0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(out.points[1][0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out.points[0][1] == 0.0);
}

TEST_CASE("normalize preserves shape and pins the max coordinate") {
  std::mt19937_64 rng(601);
  std::uniform_real_distribution<double> dist(-5.0, 9.0);
  PointCloud cloud;
  for (int i = 0; i < 100; ++i) cloud.points.push_back({dist(rng), dist(rng), dist(rng)});
  const PointCloud out = normalize(cloud);

  double max_abs = 0.0;
  for (const Vec3& p : out.points)
    for (int a = 0; a < 3; ++a) max_abs = std::max(max_abs, std::abs(p[a]));
  CHECK(max_abs == doctest::Approx(1.0).epsilon(1e-12));

  // Aspect preserved: pairwise distance ratios survive the similarity map.
  auto dist3 = [](const Vec3& a, const Vec3& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                     (a[2] - b[2]) * (a[2] - b[2]));
  };
  const double before = dist3(cloud.points[0], cloud.points[1]) / dist3(cloud.points[2], cloud.points[3]);
  const double after = dist3(out.points[0], out.points[1]) / dist3(out.points[2], out.points[3]);
  CHECK(after == doctest::Approx(before).epsilon(1e-10));

  // Idempotence.
  const PointCloud twice = normalize(out);
  for (size_t i = 0; i < out.points.size(); ++i)
    for (int a = 0; a < 3; ++a) CHECK(twice.points[i][a] == doctest::Approx(out.points[i][a]).epsilon(1e-12));
}

TEST_CASE("normalize rejects degenerate clouds") {
  PointCloud cloud;
  cloud.points = {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(normalize(cloud), std::invalid_argument);
  CHECK_THROWS_AS(normalize(PointCloud{}), std::invalid_argument);
}

TEST_CASE("OFF parsing and mesh sampling") {
  SUBCASE("single triangle keeps samples inside") {
    std::istringstream off(
        "OFF\n"
        "3 1 0\n"
        "0 0 0\n"
        "1 0 0\n"
        "0 1 0\n"
        "3 0 1 2\n");
    const OffMesh mesh = parse_off(off, "tri");
    std::mt19937_64 rng(603);
    const PointCloud cloud = sample_mesh(mesh, 500, rng);
    for (const Vec3& p : cloud.points) {
      CHECK(p[0] >= -1e-12);
      CHECK(p[1] >= -1e-12);
      CHECK(p[0] + p[1] <= 1.0 + 1e-12);
      CHECK(std::abs(p[2]) <= 1e-12);
    }
  }

  SUBCASE("sampling is proportional to triangle area") {
    // Areas 0.5 and 1.5: expect a 25/75 split.
    std::istringstream off(
        "OFF\n"
        "6 2 0\n"
        "0 0 0\n1 0 0\n0 1 0\n"
        "5 0 0\n8 0 0\n5 1 0\n"
        "3 0 1 2\n"
        "3 3 4 5\n");
    const OffMesh mesh = parse_off(off, "two");
    std::mt19937_64 rng(605);
    const PointCloud cloud = sample_mesh(mesh, 100000, rng);
    int low = 0;
    for (const Vec3& p : cloud.points) {
      if (p[0] < 2.0) ++low;
    }
    CHECK(low / 100000.0 == doctest::Approx(0.25).epsilon(0.04));
  }

  SUBCASE("unit cube centroid lands at its center") {
    std::ostringstream off;
    off << "OFF\n8 12 0\n";
    for (int i = 0; i < 8; ++i) {
      off << ((i >> 2) & 1) << " " << ((i >> 1) & 1) << " " << (i & 1) << "\n";
    }
    const int faces[12][3] = {{0, 1, 3}, {0, 3, 2}, {4, 6, 7}, {4, 7, 5}, {0, 4, 5}, {0, 5, 1},
                              {2, 3, 7}, {2, 7, 6}, {0, 2, 6}, {0, 6, 4}, {1, 5, 7}, {1, 7, 3}};
    for (const auto& f : faces) off << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    std::istringstream in(off.str());
    const OffMesh mesh = parse_off(in, "cube");
    std::mt19937_64 rng(607);
    const PointCloud cloud = sample_mesh(mesh, 100000, rng);
    Vec3 centroid{0, 0, 0};
    for (const Vec3& p : cloud.points)
      for (int a = 0; a < 3; ++a) centroid[a] += p[a];
    for (int a = 0; a < 3; ++a) CHECK(centroid[a] / 100000.0 == doctest::Approx(0.5).epsilon(0.02));
  }

  SUBCASE("malformed input names the line") {
    std::istringstream off("OFF\n3 1 0\n0 0 0\n1 0\n0 1 0\n3 0 1 2\n");
    CHECK_THROWS_WITH_AS(parse_off(off, "bad"), doctest::Contains("bad:4"), std::runtime_error);
    std::istringstream not_off("PLY\n");
    CHECK_THROWS_AS(parse_off(not_off, "x"), std::runtime_error);
    std::istringstream quad("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
    CHECK_THROWS_WITH_AS(parse_off(quad, "quad"), doctest::Contains("triangular"), std::runtime_error);
  }
}

TEST_CASE("synthetic dataset is deterministic and labeled") {
  const std::vector<Shape> classes{Shape::sphere, Shape::cube};
  const auto a = synth_dataset(classes, 3, 64, 999);
  const auto b = synth_dataset(classes, 3, 64, 999);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    REQUIRE(a[i].points.size() == b[i].points.size());
    for (size_t j = 0; j < a[i].points.size(); ++j)
      for (int axis = 0; axis < 3; ++axis) CHECK(a[i].points[j][axis] == b[i].points[j][axis]);
  }
  CHECK(*a[0].label == 0);
  CHECK(*a[5].label == 1);
  CHECK_THROWS_AS(synth_dataset({Shape::sphere}, 3, 64, 1), std::invalid_argument);
}

TEST_CASE("raw sphere samples sit on the unit sphere") {
  std::mt19937_64 rng(611);
  const PointCloud cloud = synth::sphere(500, rng);
  for (const Vec3& p : cloud.points) {
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mean-coordinate probe is weaker than shape structure") {
  // The normalized clouds are centred, so a nearest-centroid probe on mean
  // coordinates collapses to near-chance; this is the floor any real model
  // has to beat.
  const std::vector<Shape> classes{Shape::sphere, Shape::cube, Shape::cylinder, Shape::torus};
  const auto train = synth_dataset(classes, 20, 128, 613);
  const auto test = synth_dataset(classes, 10, 128, 617);

  std::array<Vec3, 4> centroids{};
  std::array<int, 4> counts{};
  for (const PointCloud& c : train) {
    Vec3 mean{0, 0, 0};
    for (const Vec3& p : c.points)
      for (int a = 0; a < 3; ++a) mean[a] += p[a] / c.points.size();
    for (int a = 0; a < 3; ++a) centroids[*c.label][a] += mean[a];
    counts[*c.label]++;
  }
  for (int ci = 0; ci < 4; ++ci)
    for (int a = 0; a < 3; ++a) centroids[ci][a] /= counts[ci];

  int correct = 0;
  for (const PointCloud& c : test) {
    Vec3 mean{0, 0, 0};
    for (const Vec3& p : c.points)
      for (int a = 0; a < 3; ++a) mean[a] += p[a] / c.points.size();
    int best = 0;
    double best_d = 1e300;
    for (int ci = 0; ci < 4; ++ci) {
      double d = 0;
      for (int a = 0; a < 3; ++a) d += (mean[a] - centroids[ci][a]) * (mean[a] - centroids[ci][a]);
      if (d < best_d) {
        best_d = d;
        best = ci;
      }
    }
    if (best == *c.label) ++correct;
  }
  const double probe = static_cast<double>(correct) / test.size();
  CHECK(probe < 0.7);  // far from the >= 0.9 a trained model reaches
}

TEST_CASE("lut_size_bytes follows the 4 d^m k rule") {
  CHECK(lut_size_bytes(8, 3, 1024) == 2097152);       // 2.00 MB
  CHECK(lut_size_bytes(4, 3, 1024) == 262144);        // 0.25 MB
  CHECK(lut_size_bytes(1024, 3, 1024) == 4398046511104ULL);  // ~4 TB
  CHECK_THROWS_AS(lut_size_bytes(1, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(lut_size_bytes(1024, 6, 1ULL << 40), std::overflow_error);
}

TEST_CASE("lut files round trip bitwise") {
  const Lattice3 lat(4, {-1, -0.5, 0}, {1, 2, 3});
  Lut lut(lat, 7);
  std::mt19937_64 rng(619);
  std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
  for (float& v : lut.data) v = dist(rng);

  const std::string path = temp_path("roundtrip.lut");
  write_lut(path, lut);
  const Lut back = read_lut(path);
  CHECK(back.lattice.d == 4);
  CHECK(back.k == 7);
  for (int a = 0; a < 3; ++a) {
    CHECK(back.lattice.lo[a] == doctest::Approx(lat.lo[a]));
    CHECK(back.lattice.hi[a] == doctest::Approx(lat.hi[a]));
  }
  REQUIRE(back.data.size() == lut.data.size());
  for (size_t i = 0; i < lut.data.size(); ++i) CHECK(back.data[i] == lut.data[i]);

  // Payload length (header excluded) matches the size formula.
  CHECK(std::filesystem::file_size(path) - 40 == lut_size_bytes(4, 3, 7));
  std::remove(path.c_str());
}

TEST_CASE("lut reader reports bad headers and truncation") {
  const std::string path = temp_path("bad.lut");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_WITH_AS(read_lut(path), doctest::Contains("magic"), std::runtime_error);

  Lut lut(Lattice3(3), 2);
  write_lut(path, lut);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 9);
  CHECK_THROWS_WITH_AS(read_lut(path), doctest::Contains("expected"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("xyz files round trip and skip comments") {
  const std::string path = temp_path("cloud.xyz");
  {
    std::ofstream out(path);
    out << "# a comment\n";
    out << "0.5 0.25 -1\n";
    out << "\n";
    out << "1 2 3\n";
    out << "# trailing comment\n";
    out << "-0.125 0 4.5\n";
  }
  const PointCloud cloud = read_xyz(path);
  REQUIRE(cloud.points.size() == 3);
  CHECK(cloud.points[0][0] == 0.5);
  CHECK(cloud.points[1][2] == 3.0);
  CHECK(cloud.points[2][0] == -0.125);

  const std::string path2 = temp_path("cloud2.xyz");
  write_xyz(path2, cloud);
  const PointCloud back = read_xyz(path2);
  REQUIRE(back.points.size() == 3);
  for (size_t i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) CHECK(back.points[i][a] == cloud.points[i][a]);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("checkpoints round trip the model") {
  TrainConfig cfg;
  cfg.variant = Variant::luti_mlp_e2e;
  cfg.d = 4;
  cfg.k = 8;
  cfg.hidden = {12, 10};
  cfg.classes = 3;
  cfg.seed = 77;
  const Model model = init_model(cfg);

  const std::string path = temp_path("model.ckpt");
  save_checkpoint(path, model);
  const Model back = load_checkpoint(path);
  CHECK(back.variant == model.variant);
  CHECK(back.k == model.k);
  CHECK(back.lattice.d == model.lattice.d);
  REQUIRE(back.embed_mlp.layers.size() == model.embed_mlp.layers.size());
  for (size_t l = 0; l < model.embed_mlp.layers.size(); ++l) {
    const auto& a = model.embed_mlp.layers[l];
    const auto& b = back.embed_mlp.layers[l];
    REQUIRE(a.w.data.size() == b.w.data.size());
    for (size_t i = 0; i < a.w.data.size(); ++i) CHECK(a.w.data[i] == b.w.data[i]);
    for (size_t i = 0; i < a.b.size(); ++i) CHECK(a.b[i] == b.b[i]);
    CHECK(a.act == b.act);
  }

  TrainConfig direct_cfg;
  direct_cfg.variant = Variant::luti_direct;
  direct_cfg.d = 3;
  direct_cfg.k = 4;
  direct_cfg.classes = 2;
  const Model direct = init_model(direct_cfg);
  save_checkpoint(path, direct);
  const Model direct_back = load_checkpoint(path);
  REQUIRE(direct_back.table.size() == direct.table.size());
  for (size_t i = 0; i < direct.table.size(); ++i) CHECK(direct_back.table[i] == direct.table[i]);
  std::remove(path.c_str());
}

TEST_CASE("directory datasets map sorted class folders to labels") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "luti_dirdata";
  fs::remove_all(root);
  fs::create_directories(root / "alpha");
  fs::create_directories(root / "beta");
  {
    std::ofstream a(root / "alpha" / "one.xyz");
    a << "0 0 0\n1 1 1\n-1 0.5 0\n";
    std::ofstream b(root / "beta" / "two.xyz");
    b << "2 0 0\n0 2 0\n0 0 2\n0 0 0\n";
  }
  std::vector<std::string> names;
  const auto data = load_directory_dataset(root.string(), 128, 1, names);
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "alpha");
  CHECK(names[1] == "beta");
  REQUIRE(data.size() == 2);
  CHECK(*data[0].label == 0);
  CHECK(*data[1].label == 1);
  CHECK(data[1].points.size() == 4);
  fs::remove_all(root);
}
