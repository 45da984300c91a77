#pragma once

#include <vector>

#include "luti/numeric.hpp"

namespace luti {

/// Channel-wise max over per-point embeddings plus the index of the
/// contributing point for each channel.
struct GlobalFeature {
  Vector a;
  std::vector<int> argmax;
};

/// Per-channel max with recorded argmax over an n x k embedding matrix.
/// Ties keep the smallest point index. n = 0 is an error.
GlobalFeature max_aggregate(const Matrix& embeddings);

}  // namespace luti
