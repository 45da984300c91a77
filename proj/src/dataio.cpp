#include "luti/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace luti {

PointCloud normalize(const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("normalize: empty cloud");
  Vec3 centroid{0.0, 0.0, 0.0};
  for (const Vec3& p : cloud.points) {
    for (int a = 0; a < 3; ++a) centroid[a] += p[a];
  }
  for (int a = 0; a < 3; ++a) centroid[a] /= static_cast<double>(cloud.points.size());
  double max_abs = 0.0;
  for (const Vec3& p : cloud.points) {
    for (int a = 0; a < 3; ++a) max_abs = std::max(max_abs, std::abs(p[a] - centroid[a]));
  }
  if (max_abs <= 0.0) throw std::invalid_argument("normalize: degenerate cloud with zero extent");
  PointCloud out;
  out.label = cloud.label;
  out.points.reserve(cloud.points.size());
  const double scale = 1.0 / max_abs;
  for (const Vec3& p : cloud.points) {
    out.points.push_back({(p[0] - centroid[0]) * scale, (p[1] - centroid[1]) * scale,
                          (p[2] - centroid[2]) * scale});
  }
  return out;
}

namespace {

[[noreturn]] void off_error(const std::string& name, int line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

// Next content line, skipping blanks and '#' comments.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const size_t pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

OffMesh parse_off(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) off_error(name, lineno, "empty file");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") off_error(name, lineno, "expected OFF header");

  long nv = -1, nf = -1, ne = 0;
  if (header >> nv >> nf) {
    header >> ne;
  } else {
    if (!next_line(in, line, lineno)) off_error(name, lineno, "missing vertex/face counts");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) off_error(name, lineno, "malformed vertex/face counts");
    counts >> ne;
  }
  if (nv < 0 || nf < 1) off_error(name, lineno, "mesh must have at least one face");

  OffMesh mesh;
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, lineno)) off_error(name, lineno, "unexpected end of vertex list");
    std::istringstream fields(line);
    Vec3 v;
    if (!(fields >> v[0] >> v[1] >> v[2])) off_error(name, lineno, "malformed vertex");
    mesh.vertices.push_back(v);
  }
  mesh.faces.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!next_line(in, line, lineno)) off_error(name, lineno, "unexpected end of face list");
    std::istringstream fields(line);
    int arity;
    if (!(fields >> arity)) off_error(name, lineno, "malformed face");
    if (arity != 3) off_error(name, lineno, "only triangular faces are supported");
    std::array<int, 3> f;
    if (!(fields >> f[0] >> f[1] >> f[2])) off_error(name, lineno, "malformed face indices");
    for (int idx : f) {
      if (idx < 0 || idx >= static_cast<int>(mesh.vertices.size())) {
        off_error(name, lineno, "face index out of range");
      }
    }
    mesh.faces.push_back(f);
  }
  return mesh;
}

OffMesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_off(in, path);
}

PointCloud sample_mesh(const OffMesh& mesh, int n, std::mt19937_64& rng) {
  if (mesh.faces.empty()) throw std::invalid_argument("sample_mesh: mesh has no faces");
  if (n < 1) throw std::invalid_argument("sample_mesh: need at least one sample");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (size_t i = 0; i < mesh.faces.size(); ++i) {
    const Vec3& a = mesh.vertices[mesh.faces[i][0]];
    const Vec3& b = mesh.vertices[mesh.faces[i][1]];
    const Vec3& c = mesh.vertices[mesh.faces[i][2]];
    const Vec3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Vec3 ac{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const Vec3 cross{ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2],
                     ab[0] * ac[1] - ab[1] * ac[0]};
    total += 0.5 * std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]);
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample_mesh: zero total surface area");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud out;
  out.points.reserve(n);
  for (int s = 0; s < n; ++s) {
    const double pick = unit(rng) * total;
    const size_t face = std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
                        cumulative.begin();
    const auto& f = mesh.faces[std::min(face, mesh.faces.size() - 1)];
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    out.points.push_back({wa * a[0] + wb * b[0] + wc * c[0], wa * a[1] + wb * b[1] + wc * c[1],
                          wa * a[2] + wb * b[2] + wc * c[2]});
  }
  return out;
}

Shape shape_from_name(const std::string& name) {
  for (Shape s : {Shape::sphere, Shape::cube, Shape::cylinder, Shape::torus, Shape::plane}) {
    if (name == shape_name(s)) return s;
  }
  throw std::invalid_argument("unknown shape: " + name);
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::sphere: return "sphere";
    case Shape::cube: return "cube";
    case Shape::cylinder: return "cylinder";
    case Shape::torus: return "torus";
    case Shape::plane: return "plane";
  }
  return "?";
}

namespace synth {

PointCloud sphere(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec3 g{gauss(rng), gauss(rng), gauss(rng)};
    double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    while (norm < 1e-12) {
      g = {gauss(rng), gauss(rng), gauss(rng)};
      norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    }
    out.points.push_back({g[0] / norm, g[1] / norm, g[2] / norm});
  }
  return out;
}

PointCloud cube(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> face(0, 5);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int f = face(rng);
    const double u = coord(rng), v = coord(rng);
    const int axis = f / 2;
    const double side = (f % 2) ? 1.0 : -1.0;
    Vec3 p;
    p[axis] = side;
    p[(axis + 1) % 3] = u;
    p[(axis + 2) % 3] = v;
    out.points.push_back(p);
  }
  return out;
}

PointCloud cylinder(int n, std::mt19937_64& rng) {
  // Nearly cube-matched extents keep the class readable only through
  // curvature-scale detail rather than bounding-box cues.
  std::uniform_real_distribution<double> height_dist(0.9, 1.1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = height_dist(rng);  // half height; radius 1, axis y
  const double lateral = 2.0 * M_PI * 2.0 * h;
  const double caps = 2.0 * M_PI;
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * M_PI * unit(rng);
    if (unit(rng) * (lateral + caps) < lateral) {
      const double y = (2.0 * unit(rng) - 1.0) * h;
      out.points.push_back({std::cos(theta), y, std::sin(theta)});
    } else {
      const double r = std::sqrt(unit(rng));
      const double y = unit(rng) < 0.5 ? -h : h;
      out.points.push_back({r * std::cos(theta), y, r * std::sin(theta)});
    }
  }
  return out;
}

PointCloud torus(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> minor_dist(0.25, 0.4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = minor_dist(rng);  // tube radius; ring radius 1, axis y
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * M_PI * unit(rng);
    double phi;
    // Area element is proportional to 1 + r cos(phi); rejection keeps the
    // sampling uniform over the surface.
    for (;;) {
      phi = 2.0 * M_PI * unit(rng);
      if (unit(rng) * (1.0 + r) <= 1.0 + r * std::cos(phi)) break;
    }
    const double ring = 1.0 + r * std::cos(phi);
    out.points.push_back({ring * std::cos(theta), r * std::sin(phi), ring * std::sin(theta)});
  }
  return out;
}

PointCloud plane(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> aspect(0.4, 1.0);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  const double depth = aspect(rng);
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.points.push_back({coord(rng), 0.0, coord(rng) * depth});
  }
  return out;
}

PointCloud shape_cloud(Shape s, int n, std::mt19937_64& rng) {
  switch (s) {
    case Shape::sphere: return sphere(n, rng);
    case Shape::cube: return cube(n, rng);
    case Shape::cylinder: return cylinder(n, rng);
    case Shape::torus: return torus(n, rng);
    case Shape::plane: return plane(n, rng);
  }
  throw std::invalid_argument("shape_cloud: unknown shape");
}

}  // namespace synth

std::vector<PointCloud> synth_dataset(const std::vector<Shape>& classes, int per_class,
                                      int n_points, uint64_t seed) {
  if (classes.size() < 2) throw std::invalid_argument("synth_dataset: need at least 2 classes");
  if (per_class < 1 || n_points < 1) {
    throw std::invalid_argument("synth_dataset: per_class and n_points must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<PointCloud> out;
  out.reserve(classes.size() * per_class);
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    for (int j = 0; j < per_class; ++j) {
      PointCloud cloud = normalize(synth::shape_cloud(classes[ci], n_points, rng));
      cloud.label = static_cast<int>(ci);
      out.push_back(std::move(cloud));
    }
  }
  return out;
}

uint64_t lut_size_bytes(uint64_t d, uint64_t m, uint64_t k) {
  if (d < 2 || m < 1 || k < 1) throw std::invalid_argument("lut_size_bytes: d >= 2, m >= 1, k >= 1");
  unsigned __int128 total = 4;
  for (uint64_t i = 0; i < m; ++i) total *= d;
  total *= k;
  if (total > std::numeric_limits<uint64_t>::max()) {
    throw std::overflow_error("lut_size_bytes: size overflows 64 bits");
  }
  return static_cast<uint64_t>(total);
}

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<uint32_t>(f)); }

bool get_u32(std::istream& in, uint32_t& v) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
  v = static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
      (static_cast<uint32_t>(bytes[2]) << 16) | (static_cast<uint32_t>(bytes[3]) << 24);
  return true;
}

bool get_f32(std::istream& in, float& f) {
  uint32_t bits;
  if (!get_u32(in, bits)) return false;
  f = std::bit_cast<float>(bits);
  return true;
}

constexpr uint32_t kLutVersion = 1;

}  // namespace

void write_lut(const std::string& path, const Lut& lut) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write("LUTI", 4);
  put_u32(out, kLutVersion);
  put_u32(out, static_cast<uint32_t>(lut.lattice.d));
  put_u32(out, static_cast<uint32_t>(lut.k));
  for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(lut.lattice.lo[a]));
  for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(lut.lattice.hi[a]));
  for (float f : lut.data) put_f32(out, f);
  if (!out) throw std::runtime_error("write failed for " + path);
}

Lut read_lut(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "LUTI", 4) != 0) {
    throw std::runtime_error(path + ": bad magic, not a LUTI table file");
  }
  uint32_t version, d, k;
  if (!get_u32(in, version) || !get_u32(in, d) || !get_u32(in, k)) {
    throw std::runtime_error(path + ": truncated header");
  }
  if (version != kLutVersion) {
    throw std::runtime_error(path + ": unsupported version " + std::to_string(version));
  }
  if (d < 2 || k < 1) throw std::runtime_error(path + ": invalid dimensions in header");
  float bounds[6];
  for (float& b : bounds) {
    if (!get_f32(in, b)) throw std::runtime_error(path + ": truncated bounds");
  }
  Lattice3 lattice(static_cast<int>(d), {bounds[0], bounds[1], bounds[2]},
                   {bounds[3], bounds[4], bounds[5]});
  Lut lut(lattice, static_cast<int>(k));
  const size_t expected = lut.data.size();
  for (size_t i = 0; i < expected; ++i) {
    if (!get_f32(in, lut.data[i])) {
      throw std::runtime_error(path + ": truncated payload, expected " +
                               std::to_string(expected * 4) + " bytes, got " +
                               std::to_string(i * 4));
    }
  }
  return lut;
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  for (const Vec3& p : cloud.points) out << p[0] << " " << p[1] << " " << p[2] << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

PointCloud read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  PointCloud cloud;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream fields(line);
    Vec3 p;
    if (!(fields >> p[0] >> p[1] >> p[2])) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed point line");
    }
    cloud.points.push_back(p);
  }
  if (cloud.points.empty()) throw std::runtime_error(path + ": no points");
  return cloud;
}

namespace {

using nlohmann::json;

json mlp_to_json(const Mlp& mlp) {
  json layers = json::array();
  for (const Layer& layer : mlp.layers) {
    layers.push_back({{"rows", layer.w.rows},
                      {"cols", layer.w.cols},
                      {"w", layer.w.data},
                      {"b", layer.b},
                      {"act", layer.act == Activation::relu ? "relu" : "none"}});
  }
  return {{"layers", layers}};
}

Mlp mlp_from_json(const json& j) {
  Mlp mlp;
  for (const json& lj : j.at("layers")) {
    Layer layer;
    layer.w = Matrix(lj.at("rows").get<int>(), lj.at("cols").get<int>());
    layer.w.data = lj.at("w").get<std::vector<double>>();
    layer.b = lj.at("b").get<std::vector<double>>();
    if (layer.w.data.size() != static_cast<size_t>(layer.w.rows) * layer.w.cols) {
      throw std::runtime_error("checkpoint: layer weight size mismatch");
    }
    const std::string act = lj.at("act").get<std::string>();
    layer.act = act == "relu" ? Activation::relu : Activation::none;
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model) {
  json j;
  j["format"] = "luti-checkpoint";
  j["version"] = 1;
  j["variant"] = variant_name(model.variant);
  j["k"] = model.k;
  j["d"] = model.lattice.d;
  j["lo"] = model.lattice.lo;
  j["hi"] = model.lattice.hi;
  if (model.uses_mlp()) {
    j["embed_mlp"] = mlp_to_json(model.embed_mlp);
  } else {
    j["table"] = model.table;
  }
  j["head"] = mlp_to_json(model.head);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": not a valid checkpoint: " + e.what());
  }
  if (j.value("format", "") != "luti-checkpoint") {
    throw std::runtime_error(path + ": not a luti checkpoint");
  }
  if (j.value("version", 0) != 1) throw std::runtime_error(path + ": unsupported checkpoint version");
  Model model;
  model.variant = variant_from_name(j.at("variant").get<std::string>());
  model.k = j.at("k").get<int>();
  model.lattice = Lattice3(j.at("d").get<int>(), j.at("lo").get<Vec3>(), j.at("hi").get<Vec3>());
  if (model.uses_mlp()) {
    model.embed_mlp = mlp_from_json(j.at("embed_mlp"));
  } else {
    model.table = j.at("table").get<std::vector<double>>();
    if (model.table.size() != static_cast<size_t>(model.lattice.node_count()) * model.k) {
      throw std::runtime_error(path + ": table size does not match d and k");
    }
  }
  model.head = mlp_from_json(j.at("head"));
  return model;
}

std::vector<PointCloud> load_directory_dataset(const std::string& dir, int n_points, uint64_t seed,
                                               std::vector<std::string>& class_names) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error(dir + " is not a directory");
  class_names.clear();
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) class_names.push_back(entry.path().filename().string());
  }
  std::sort(class_names.begin(), class_names.end());
  if (class_names.size() < 2) throw std::runtime_error(dir + ": need at least 2 class directories");

  std::mt19937_64 rng(seed);
  std::vector<PointCloud> out;
  for (size_t ci = 0; ci < class_names.size(); ++ci) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(fs::path(dir) / class_names[ci])) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".xyz" || ext == ".off") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      PointCloud cloud = file.extension() == ".off"
                             ? sample_mesh(read_off(file.string()), n_points, rng)
                             : read_xyz(file.string());
      cloud = normalize(cloud);
      cloud.label = static_cast<int>(ci);
      out.push_back(std::move(cloud));
    }
  }
  if (out.empty()) throw std::runtime_error(dir + ": no .xyz or .off files found");
  return out;
}

}  // namespace luti
