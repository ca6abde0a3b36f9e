#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace symh {

// Deterministic block-parallel map: the index range is cut into fixed-size
// blocks, workers grab blocks through an atomic counter and write results
// into preallocated slots, and the caller combines slots in index order.
// The partition does not depend on the thread count, so any reduction done
// in slot order gives bit-identical results for 1 and N threads.
template <typename T, typename Fn>
std::vector<T> parallel_blocks(std::size_t count, std::size_t block_size, int threads, Fn&& fn) {
    if (block_size == 0) block_size = 1;
    std::size_t n_blocks = (count + block_size - 1) / block_size;
    std::vector<T> out(count);
    if (threads <= 1 || n_blocks <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&]() {
        try {
            for (;;) {
                std::size_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                std::size_t lo = b * block_size;
                std::size_t hi = lo + block_size < count ? lo + block_size : count;
                for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mutex);
            if (!err) err = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    int n = threads < static_cast<int>(n_blocks) ? threads : static_cast<int>(n_blocks);
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace symh
