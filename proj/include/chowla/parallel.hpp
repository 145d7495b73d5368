#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace chowla {

inline unsigned default_workers() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Evaluates fn(shard) for every shard in [0, shards) on up to `workers`
/// threads and returns the results indexed by shard. Callers fold the
/// vector in index order, so the outcome never depends on scheduling.
/// The lowest-indexed failure is rethrown after all threads join.
template <class Result, class Fn>
std::vector<Result> run_shards(std::size_t shards, unsigned workers, Fn&& fn) {
  std::vector<Result> results(shards);
  std::vector<std::exception_ptr> errors(shards);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < shards; k = next++) {
      try {
        results[k] = fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(shards)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace chowla
