// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace drforge {

// Resolves a requested thread count: explicit > DR_FORGE_THREADS > hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DR_FORGE_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Dynamic work distribution over [0, count). Workers pull the next index from a
// shared counter, so the call order is nondeterministic; callers must write to
// disjoint outputs. The first exception thrown by `func` is rethrown.
template <typename Func>
void parallel_for(int count, int threads, Func&& func) {
  threads = std::min(resolve_threads(threads), std::max(count, 1));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) func(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed) {
      int i = next.fetch_add(1);
      if (i >= count) break;
      try {
        func(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace drforge
