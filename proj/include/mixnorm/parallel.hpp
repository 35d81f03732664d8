#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mixnorm {

/// Resolves a worker count: explicit value if > 0, else MIXNORM_THREADS,
/// else 1.
unsigned resolve_workers(unsigned requested);

/// Splits [0, count) into fixed-size chunks and evaluates fn(begin, end) for
/// each on up to `workers` threads. Results come back indexed by chunk, so
/// any reduction over them in order is independent of the worker count.
template <class Fn>
auto parallel_chunks(std::size_t count, std::size_t chunk_size, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}, std::size_t{}));
    const std::size_t chunk = std::max<std::size_t>(chunk_size, 1);
    const std::size_t n_chunks = (count + chunk - 1) / chunk;
    std::vector<Result> results(n_chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                const std::size_t begin = c * chunk;
                results[c] = fn(begin, std::min(count, begin + chunk));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
            }
        }
    };

    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), n_chunks));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace mixnorm
