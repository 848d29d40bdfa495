#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "shellpinn/errors.hpp"

namespace shellpinn {

/// Worker threads for per-point work: SHELLPINN_THREADS if set, otherwise the
/// hardware concurrency. Results never depend on this number.
inline int thread_count() {
  if (const char* env = std::getenv("SHELLPINN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
      throw ConfigError("SHELLPINN_THREADS", "expected a positive integer, got '" + std::string(env) + "'");
    }
    return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers with a static
/// round-robin assignment. The first exception (by index) is rethrown.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sums equally sized vectors pairwise in a fixed tree order.
inline std::vector<double> pairwise_sum(std::vector<std::vector<double>> parts) {
  if (parts.empty()) return {};
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      auto& a = parts[i];
      const auto& b = parts[i + stride];
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    }
  }
  return std::move(parts.front());
}

/// Splits [0, n) into fixed blocks of `block` points. Each block writes
/// `width` values into its own zeroed buffer; the buffers are then reduced in a
/// fixed order, so the result does not depend on the thread count.
template <class F>
std::vector<double> block_sums(std::size_t n, std::size_t block, std::size_t width, int threads, F&& fn) {
  const std::size_t nb = (n + block - 1) / block;
  if (nb == 0) return std::vector<double>(width, 0.0);
  std::vector<std::vector<double>> out(nb, std::vector<double>(width, 0.0));
  parallel_for(nb, threads, [&](std::size_t i) {
    fn(i * block, std::min(n, (i + 1) * block), std::span<double>(out[i]));
  });
  return pairwise_sum(std::move(out));
}

}  // namespace shellpinn
