#pragma once

#include <array>
#include <optional>
#include <vector>

namespace luti {

using Vec3 = std::array<double, 3>;

/// A set of points in R^3 with an optional class label.
struct PointCloud {
  std::vector<Vec3> points;
  std::optional<int> label;

  int size() const { return static_cast<int>(points.size()); }
};

}  // namespace luti
