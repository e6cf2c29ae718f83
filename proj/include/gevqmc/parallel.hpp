#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace gevqmc {

/// Hardware concurrency, at least 1.
int default_threads();

/// Runs body(index, worker) for index in [0, count) on up to `threads`
/// workers; worker ids lie in [0, threads). Indices are handed out in chunks
/// dynamically, so the index-to-worker mapping is not deterministic. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body, std::size_t chunk = 1) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>((count + chunk - 1) / std::max<std::size_t>(chunk, 1))));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&](int id) {
        try {
            while (true) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) return;
                const std::size_t end = std::min(count, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) body(i, id);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (int id = 1; id < threads; ++id) pool.emplace_back(worker, id);
    worker(0);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Pairwise sum of values[begin, end) in a fixed tree order.
template <class T>
T pairwise_sum(const std::vector<T>& values, std::size_t begin, std::size_t end) {
    if (end - begin == 1) return values[begin];
    const std::size_t mid = begin + (end - begin) / 2;
    T left = pairwise_sum(values, begin, mid);
    left += pairwise_sum(values, mid, end);
    return left;
}

/// Sum of eval(i, worker) over i in [0, count). Terms are accumulated
/// sequentially inside fixed blocks of `block` indices and the block sums are
/// combined pairwise, so the result is bitwise independent of `threads`.
/// `zero` supplies the additive identity (e.g. a zero vector of the right size).
template <class T, class Eval>
T ordered_sum(std::size_t count, int threads, const T& zero, Eval&& eval, std::size_t block = 16) {
    if (count == 0) return zero;
    const std::size_t blocks = (count + block - 1) / block;
    std::vector<T> partial(blocks, zero);
    parallel_for(blocks, threads, [&](std::size_t b, int worker) {
        const std::size_t end = std::min(count, (b + 1) * block);
        T acc = zero;
        for (std::size_t i = b * block; i < end; ++i) acc += eval(i, worker);
        partial[b] = std::move(acc);
    });
    return pairwise_sum(partial, 0, blocks);
}

}  // namespace gevqmc
