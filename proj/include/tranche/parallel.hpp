#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace tranche {

/// Worker thread cap from TRANCHE_KERNEL_THREADS; 0, unset, or unparsable
/// means automatic (hardware concurrency).
inline std::size_t worker_thread_count() {
    std::size_t count = 0;
    if (const char* env = std::getenv("TRANCHE_KERNEL_THREADS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0')
            count = static_cast<std::size_t>(parsed);
    }
    if (count == 0) {
        count = std::thread::hardware_concurrency();
        if (count == 0)
            count = 1;
    }
    return count;
}

/// Runs body(batch_index) for every index in [0, batch_count) across at most
/// `threads` workers. Batches are independent; callers own any per-batch
/// output slots and must combine them in batch order afterwards.
template <class F>
void parallel_batches(std::size_t batch_count, std::size_t threads, F&& body) {
    if (threads <= 1 || batch_count <= 1) {
        for (std::size_t b = 0; b < batch_count; ++b)
            body(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min(threads, batch_count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= batch_count)
                    return;
                body(b);
            }
        });
    }
    for (auto& t : pool)
        t.join();
}

} // namespace tranche
