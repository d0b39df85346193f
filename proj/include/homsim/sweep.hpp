#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

#include "homsim/errors.hpp"

namespace homsim {

inline std::vector<double> linspace(double lo, double hi, int n) {
  detail::require(n >= 1, "grid size must be >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out[n - 1] = hi;
  return out;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  detail::require(lo > 0.0 && hi > 0.0, "log grid bounds must be > 0");
  auto e = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : e) x = std::exp(x);
  if (n > 1) {
    e.front() = lo;
    e.back() = hi;
  }
  return e;
}

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Evaluates f(i) for i in [0, count). Each result lands at its own index, so
// output is identical for any thread count. The first exception (lowest index)
// is rethrown.
template <class F>
auto parallel_map(std::size_t count, F&& f, unsigned threads = 0) {
  using R = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<R> out(count);
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) {
        try {
          out[i] = f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace homsim
