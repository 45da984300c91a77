#pragma once

#include <functional>
#include <string>
#include <vector>

namespace luti::bench {

struct Timing {
  double median_us = 0.0;
  double mean_us = 0.0;
  int repeats = 0;
};

/// Wall-clock timing of fn over `repeats` runs after `warmup` discarded
/// runs. Reports median and mean in microseconds.
Timing time_fn(const std::function<void()>& fn, int repeats, int warmup = 3);

struct Row {
  std::string method;
  std::string d;        // discretization label; "inf" for MLP-backed rows
  Timing timing;
};

std::string to_csv(const std::vector<Row>& rows);
std::string to_table(const std::vector<Row>& rows);

}  // namespace luti::bench
