// Copyright 2026 The Meshfinish Authors.
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

#pragma once

#include <cstddef>
#include <functional>

namespace meshfinish {

// Process-wide worker count used by every parallel stage. 0 resets to the
// hardware concurrency.
void set_thread_count(int threads);
int thread_count();

// Splits [begin, end) into contiguous blocks of at least `grain` items and
// runs `body(block_begin, block_end)` on up to thread_count() threads. Block
// boundaries depend only on the range, the grain and the thread count, and
// the call returns after every block finished. Exceptions from any block are
// rethrown on the caller (the first block's exception wins).
void parallel_for(std::size_t begin, std::size_t end, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

// Convenience overload calling `body(i)` for every index.
template <typename Fn>
void parallel_for_each(std::size_t begin, std::size_t end, std::size_t grain,
                       Fn&& body) {
  parallel_for(begin, end, grain, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

// RAII override of the thread count, restoring the previous value.
class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(int threads) : previous_(thread_count()) {
    set_thread_count(threads);
  }
  ~ScopedThreadCount() { set_thread_count(previous_); }
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  int previous_;
};

}  // namespace meshfinish
