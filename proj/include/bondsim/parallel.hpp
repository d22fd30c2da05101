#pragma once

// Deterministic parallel map over path indices: each worker fills disjoint
// slots of a pre-sized result vector, so the reduction order (and therefore
// any floating-point result) is independent of the thread count.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace bondsim {

inline unsigned default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1u : h;
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned n_threads, Fn&& fn) {
    std::vector<T> out(count);
    if (n_threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= count) return;
            out[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<std::size_t>(n_threads, count);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

} // namespace bondsim
