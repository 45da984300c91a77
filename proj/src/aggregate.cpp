#include "luti/aggregate.hpp"

#include <stdexcept>

namespace luti {

GlobalFeature max_aggregate(const Matrix& embeddings) {
  const int n = embeddings.rows, k = embeddings.cols;
  if (n < 1) throw std::invalid_argument("max_aggregate: empty point set");
  GlobalFeature gf;
  gf.a.assign(embeddings.data.begin(), embeddings.data.begin() + k);
  gf.argmax.assign(k, 0);
  for (int i = 1; i < n; ++i) {
    const double* row = &embeddings.data[static_cast<size_t>(i) * k];
    for (int c = 0; c < k; ++c) {
      if (row[c] > gf.a[c]) {  // strict: ties keep the smallest index
        gf.a[c] = row[c];
        gf.argmax[c] = i;
      }
    }
  }
  return gf;
}

}  // namespace luti
