// dsel/parallel.h

// Copyright 2026  The dsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DSEL_PARALLEL_H_
#define DSEL_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace dsel {

// Default worker count: $DSEL_THREADS if set and positive, else 1.
inline unsigned DefaultThreads() {
  if (const char *env = std::getenv("DSEL_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 1;
}

// Calls fn(begin, end) over contiguous chunks of [0, n).  Chunk k always
// covers the same range for a given (n, threads), so callers that write into
// per-index slots get thread-count independent results.  The exception of the
// lowest-numbered failing chunk is rethrown.
template <typename Fn>
void ParallelChunks(std::size_t n, unsigned threads, Fn &&fn) {
  if (n == 0) return;
  std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  if (workers == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dsel

#endif  // DSEL_PARALLEL_H_
