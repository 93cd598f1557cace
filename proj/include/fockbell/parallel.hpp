#pragma once

#include <cstddef>
#include <functional>

namespace fockbell {

/// Upper bound on worker threads. Defaults to FOCKBELL_THREADS when set,
/// otherwise the hardware concurrency.
int thread_limit();
void set_thread_limit(int threads);

/// Runs body(i) for every i in [0, count), splitting the range into
/// contiguous chunks across at most thread_limit() threads. Callers write
/// into per-index slots and reduce afterwards in index order, which keeps
/// results independent of the thread count. The first exception thrown by
/// any chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fockbell
