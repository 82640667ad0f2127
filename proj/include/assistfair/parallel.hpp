#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "assistfair/errors.hpp"

namespace assistfair {

/// Worker count for replication loops: ASSISTFAIR_THREADS when set to a
/// positive integer, otherwise the hardware concurrency.
unsigned default_thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only to its own pre-allocated slot. If any calls throw, the
/// exception from the lowest index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Monte Carlo replications in fixed-size blocks. Each block owns an
/// accumulator that sees its replications in index order; blocks are merged
/// in block order. The partition does not depend on the thread count, so the
/// result is identical for any number of workers. Errors are rethrown as
/// ReplicationError carrying the failing replication index.
template <class Acc, class PerRep, class Merge>
Acc run_replication_blocks(std::size_t reps, unsigned threads, PerRep&& per_rep, Merge&& merge,
                           std::size_t block_size = 256) {
  const std::size_t blocks = (reps + block_size - 1) / block_size;
  std::vector<Acc> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(reps, (b + 1) * block_size);
    for (std::size_t rep = b * block_size; rep < end; ++rep) {
      try {
        per_rep(partial[b], rep);
      } catch (const ReplicationError&) {
        throw;
      } catch (const std::exception& e) {
        throw ReplicationError(rep, e.what());
      }
    }
  });
  Acc total{};
  for (auto& p : partial) merge(total, p);
  return total;
}

/// One result slot per replication, filled in parallel.
template <class Slot, class PerRep>
std::vector<Slot> run_replication_slots(std::size_t reps, unsigned threads, PerRep&& per_rep) {
  std::vector<Slot> slots(reps);
  parallel_for(reps, threads, [&](std::size_t rep) {
    try {
      slots[rep] = per_rep(rep);
    } catch (const std::exception& e) {
      throw ReplicationError(rep, e.what());
    }
  });
  return slots;
}

}  // namespace assistfair
