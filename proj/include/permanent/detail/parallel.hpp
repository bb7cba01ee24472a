#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace permanent::detail {

/// Splits [0, total) into `workers` contiguous blocks and calls
/// fn(block_index, begin, end) for every block. Block boundaries are a pure
/// function of (total, workers); trailing blocks may be empty. With one worker
/// everything runs inline on the calling thread.
template <typename Fn>
void run_blocks(std::uint64_t total, unsigned workers, Fn&& fn) {
  const unsigned w = workers == 0 ? 1u : workers;
  const std::uint64_t q = total / w;
  const std::uint64_t r = total % w;
  auto range = [&](unsigned k) {
    const std::uint64_t begin = k * q + std::min<std::uint64_t>(k, r);
    return std::pair<std::uint64_t, std::uint64_t>{begin,
                                                   begin + q + (k < r ? 1 : 0)};
  };
  if (w == 1) {
    fn(0u, std::uint64_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned k = 0; k < w; ++k) {
    auto [begin, end] = range(k);
    pool.emplace_back([&fn, k, begin, end] { fn(k, begin, end); });
  }
  for (auto& t : pool) t.join();
}

/// Neumaier compensated accumulator. Optional stand-in for a plain double sum
/// in the exact enumeration kernels.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace permanent::detail
