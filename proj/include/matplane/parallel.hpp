#pragma once

// Deterministic chunked reductions. Work is cut into fixed-size chunks; each
// chunk owns its RNG stream (split_seed(seed, chunk)) and its partial sums,
// and the partials are combined pairwise in chunk order. The result is
// therefore bit-identical for the serial reference and for any OpenMP team
// size.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <type_traits>
#include <vector>

#include "matplane/rng.hpp"

namespace matplane {

enum class Execution { serial, parallel };

inline constexpr std::size_t kChunkSize = 1024;

template <class T>
struct SumStats {
  T sum{};
  double sum_sq = 0.0;  // sum of |v|^2
  std::size_t count = 0;

  SumStats& operator+=(const SumStats& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
    return *this;
  }

  T mean() const { return count ? sum / static_cast<double>(count) : T{}; }

  /// Standard error of the mean.
  double standard_error() const;
};

namespace detail {

inline double abs2(double v) { return v * v; }
inline double abs2(const std::complex<double>& v) { return std::norm(v); }

/// Captures the first exception thrown inside an OpenMP region.
class ExceptionSlot {
 public:
  template <class Fn>
  void run(Fn&& fn) noexcept {
    try {
      fn();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace detail

template <class T>
double SumStats<T>::standard_error() const {
  if (count < 2) return 0.0;
  const double nd = static_cast<double>(count);
  const double mean_abs2 = detail::abs2(sum / nd);
  const double var = (sum_sq / nd - mean_abs2) * nd / (nd - 1.0);
  return var > 0.0 ? std::sqrt(var / nd) : 0.0;
}

/// Pairwise (cascade) combination in index order.
template <class T>
T pairwise_combine(std::span<const T> parts) {
  if (parts.empty()) return T{};
  if (parts.size() == 1) return parts[0];
  const std::size_t half = parts.size() / 2;
  T left = pairwise_combine(parts.first(half));
  left += pairwise_combine(parts.subspan(half));
  return left;
}

/// Calls fn(i) for i in [0, count). Exceptions are propagated after the loop.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, Execution exec = Execution::parallel) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  detail::ExceptionSlot slot;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    slot.run([&] { fn(static_cast<std::size_t>(i)); });
  }
  slot.rethrow();
}

/// Sum of fn(rng) over `samples` draws; chunk c draws from split_seed(seed, c).
template <class T, class Fn>
SumStats<T> chunked_sample_sum(std::size_t samples, std::uint64_t seed, Fn&& fn,
                               Execution exec = Execution::parallel) {
  const std::size_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<SumStats<T>> partial(chunks);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Rng rng = make_rng(split_seed(seed, c));
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(samples, begin + kChunkSize);
        SumStats<T> acc;
        for (std::size_t i = begin; i < end; ++i) {
          const T v = fn(rng);
          acc.sum += v;
          acc.sum_sq += detail::abs2(v);
          ++acc.count;
        }
        partial[c] = acc;
      },
      exec);
  return pairwise_combine<SumStats<T>>(partial);
}

/// Sum of fn(i) for i in [0, count), reduced chunk-wise then pairwise.
template <class T, class Fn>
T chunked_index_sum(std::size_t count, Fn&& fn, Execution exec = Execution::parallel) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<T> partial(chunks, T{});
  parallel_for(
      chunks,
      [&](std::size_t c) {
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(count, begin + kChunkSize);
        T acc{};
        for (std::size_t i = begin; i < end; ++i) acc += fn(i);
        partial[c] = acc;
      },
      exec);
  return pairwise_combine<T>(partial);
}

}  // namespace matplane
