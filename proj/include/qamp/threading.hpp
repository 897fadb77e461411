#pragma once
// Chunked parallel loop over disjoint index ranges. Each index writes its own
// output slot, so results do not depend on the thread count.

#include <cstddef>
#include <thread>
#include <vector>

namespace qamp {

inline int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn)
{
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(std::size_t(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace qamp
