#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace zoolab {

// Deterministic trial fan-out: body(t) must write only to its own slot.
inline void parallel_for(uint64_t n, unsigned threads, const std::function<void(uint64_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (uint64_t t = 0; t < n; ++t) body(t);
        return;
    }
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            uint64_t t = next.fetch_add(1);
            if (t >= n) return;
            body(t);
        }
    };
    std::vector<std::thread> pool;
    unsigned k = std::min<unsigned>(threads, std::thread::hardware_concurrency() > 0
                                                 ? std::thread::hardware_concurrency()
                                                 : 4);
    for (unsigned i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace zoolab
