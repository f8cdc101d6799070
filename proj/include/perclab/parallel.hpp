#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace perclab {

// Static range partition: worker w gets one contiguous chunk. Results must be
// merged by the caller in worker order so output is independent of scheduling.
inline void parallel_chunks(uint64_t count, int workers,
                            const std::function<void(int, uint64_t, uint64_t)>& body) {
    if (workers < 1) workers = 1;
    if (count == 0) return;
    if (workers == 1 || count < 2) {
        body(0, 0, count);
        return;
    }
    uint64_t w = static_cast<uint64_t>(workers);
    if (w > count) w = count;
    std::vector<std::thread> threads;
    threads.reserve(w);
    uint64_t chunk = count / w, rem = count % w, begin = 0;
    for (uint64_t i = 0; i < w; ++i) {
        uint64_t len = chunk + (i < rem ? 1 : 0);
        threads.emplace_back(body, static_cast<int>(i), begin, begin + len);
        begin += len;
    }
    for (auto& t : threads) t.join();
}

}  // namespace perclab
