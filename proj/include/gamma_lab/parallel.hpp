#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

namespace gamma_lab {

/// Work is split into fixed-size blocks; reductions combine per-block
/// partials in block order, so results do not depend on the thread count.
inline constexpr std::size_t kBlockSize = 8192;

/// --threads flag, else GAMMA_LAB_THREADS, else hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> requested);

/// Calls fn(block, begin, end) for every block of [0, n) on up to `threads` workers.
template <class Fn>
void parallel_blocks(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  if (blocks == 0) return;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), blocks));
  auto run_block = [&](std::size_t b) { fn(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize)); };
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t b = next++; b < blocks; b = next++) run_block(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Monte-Carlo mean with its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

/// Compensated mean and standard error of values (fixed summation order).
MeanEstimate mean_estimate(std::span<const double> values);

}  // namespace gamma_lab
