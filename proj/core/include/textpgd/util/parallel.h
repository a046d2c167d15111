// Copyright 2026 The TextPGD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXTPGD_UTIL_PARALLEL_H_
#define TEXTPGD_UTIL_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace textpgd {

// Worker count from TEXTPGD_THREADS, falling back to hardware concurrency.
size_t DefaultThreadCount();

// Runs fn(i) for i in [0, n) on up to `threads` workers and returns the
// results in index order. The first exception thrown by any task is
// rethrown after all workers join.
template <typename T>
std::vector<T> ParallelMap(size_t n, size_t threads,
                           const std::function<T(size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };

  const size_t count = std::max<size_t>(1, std::min(threads, n));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<T> out;
  out.reserve(n);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace textpgd

#endif  // TEXTPGD_UTIL_PARALLEL_H_
