#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace asiftseg {

// Worker cap for data-parallel loops. ASIFT_THREADS=0 or unset means "use
// the hardware concurrency"; any positive value is an explicit cap.
inline int thread_budget() {
    int n = 0;
    if (const char* env = std::getenv("ASIFT_THREADS")) {
        n = std::atoi(env);
    }
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    return n;
}

// Runs fn(i) for i in [0, count). Work items must be independent and write
// only to their own output slots; results are then identical no matter how
// many workers run.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    const int workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace asiftseg
