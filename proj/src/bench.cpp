#include "luti/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace luti::bench {

Timing time_fn(const std::function<void()>& fn, int repeats, int warmup) {
  if (repeats < 1) throw std::invalid_argument("time_fn: repeats must be >= 1");
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(repeats);
  for (int i = 0; i < repeats; ++i) {
    const auto start = clock::now();
    fn();
    const auto stop = clock::now();
    samples.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
  }
  Timing t;
  t.repeats = repeats;
  for (double s : samples) t.mean_us += s;
  t.mean_us /= repeats;
  std::sort(samples.begin(), samples.end());
  const size_t mid = samples.size() / 2;
  t.median_us = samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
  return t;
}

std::string to_csv(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "method,d,median_us,mean_us,repeats\n";
  for (const Row& r : rows) {
    out << r.method << "," << r.d << "," << std::setprecision(6) << std::fixed
        << r.timing.median_us << "," << r.timing.mean_us << "," << r.timing.repeats << "\n";
  }
  return out.str();
}

std::string to_table(const std::vector<Row>& rows) {
  size_t method_w = 6, d_w = 3;
  for (const Row& r : rows) {
    method_w = std::max(method_w, r.method.size());
    d_w = std::max(d_w, r.d.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(method_w) + 2) << "method"
      << std::setw(static_cast<int>(d_w) + 2) << "d" << std::right << std::setw(14)
      << "median_us" << std::setw(14) << "mean_us" << "\n";
  for (const Row& r : rows) {
    out << std::left << std::setw(static_cast<int>(method_w) + 2) << r.method
        << std::setw(static_cast<int>(d_w) + 2) << r.d << std::right << std::fixed
        << std::setprecision(2) << std::setw(14) << r.timing.median_us << std::setw(14)
        << r.timing.mean_us << "\n";
  }
  return out.str();
}

}  // namespace luti::bench
