#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace geoscatter {

/// Calls body(i) for i in [0, n) on up to `threads` workers. Each worker
/// owns a contiguous block, so results written by index do not depend on
/// the worker count. The first exception (lowest block) is rethrown.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// out[i] = fn(i), order preserved.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t threads, Fn&& fn) {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

/// Fixed-shape pairwise sum: the association order depends only on the
/// length of the input.
template <class It>
double pairwise_sum(It first, It last) {
  const auto n = static_cast<std::size_t>(last - first);
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (It it = first; it != last; ++it) s += *it;
    return s;
  }
  const It mid = first + static_cast<std::ptrdiff_t>(n / 2);
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.begin(), v.end()); }

} // namespace geoscatter
