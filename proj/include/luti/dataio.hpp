#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "luti/lattice.hpp"
#include "luti/point_cloud.hpp"
#include "luti/training.hpp"

namespace luti {

/// Centers the centroid at the origin and uniformly scales so the largest
/// absolute coordinate is 1 (fits [-1,1]^3, aspect preserved). Zero-extent
/// clouds are an error.
PointCloud normalize(const PointCloud& cloud);

struct OffMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

/// Minimal OFF reader: "OFF" header, vertex/face counts, triangular faces.
/// Malformed input raises an error naming the line.
OffMesh read_off(const std::string& path);
OffMesh parse_off(std::istream& in, const std::string& name);

/// Samples n points with probability proportional to triangle area, uniform
/// within each triangle.
PointCloud sample_mesh(const OffMesh& mesh, int n, std::mt19937_64& rng);

enum class Shape { sphere, cube, cylinder, torus, plane };

Shape shape_from_name(const std::string& name);
const char* shape_name(Shape s);

namespace synth {
/// Raw parametric surface samples (unnormalized). The sphere has radius
/// exactly 1; other shapes carry per-cloud aspect variation drawn from rng.
PointCloud sphere(int n, std::mt19937_64& rng);
PointCloud cube(int n, std::mt19937_64& rng);
PointCloud cylinder(int n, std::mt19937_64& rng);
PointCloud torus(int n, std::mt19937_64& rng);
PointCloud plane(int n, std::mt19937_64& rng);
PointCloud shape_cloud(Shape s, int n, std::mt19937_64& rng);
}  // namespace synth

/// Deterministic-by-seed labeled dataset of normalized parametric clouds.
/// Labels are indices into the classes list. Requires >= 2 classes.
std::vector<PointCloud> synth_dataset(const std::vector<Shape>& classes, int per_class,
                                      int n_points, uint64_t seed);

/// 4 * d^m * k bytes; overflow is an error.
uint64_t lut_size_bytes(uint64_t d, uint64_t m, uint64_t k);

/// Binary table file: magic "LUTI", u32 version, u32 d, u32 k, 6 x f32
/// bounds (lo_x, lo_y, lo_z, hi_x, hi_y, hi_z), then d^3*k little-endian
/// f32 payload in node-major layout. Round trips are bitwise lossless.
void write_lut(const std::string& path, const Lut& lut);
Lut read_lut(const std::string& path);

/// Whitespace-separated ASCII, one point per line; '#' starts a comment.
void write_xyz(const std::string& path, const PointCloud& cloud);
PointCloud read_xyz(const std::string& path);

void save_checkpoint(const std::string& path, const Model& model);
Model load_checkpoint(const std::string& path);

/// Loads a directory with one subdirectory per class holding .xyz or .off
/// files. Meshes are sampled to n_points; xyz clouds are used as stored.
/// All clouds are normalized. Class indices follow sorted subdirectory
/// names, returned in class_names.
std::vector<PointCloud> load_directory_dataset(const std::string& dir, int n_points,
                                               uint64_t seed,
                                               std::vector<std::string>& class_names);

}  // namespace luti
