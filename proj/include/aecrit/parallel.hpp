#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace aecrit {

/// Fixed chunk size for point-parallel loops. The partition into chunks is
/// independent of the worker count, so any reduction that merges chunk
/// results in chunk order is bitwise deterministic.
inline constexpr std::size_t kParallelChunk = 2048;

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(chunk_index, begin, end) over [0, count) split into fixed-size
/// chunks. Chunks are claimed from an atomic counter; each chunk's result
/// must be written into a slot addressed by chunk_index only.
inline void for_each_chunk(std::size_t count, int workers,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t chunks = (count + kParallelChunk - 1) / kParallelChunk;
    workers = resolve_workers(workers);
    if (workers == 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            body(c, c * kParallelChunk, std::min(count, (c + 1) * kParallelChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c, c * kParallelChunk, std::min(count, (c + 1) * kParallelChunk));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), chunks));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::size_t chunk_count(std::size_t count) {
    return (count + kParallelChunk - 1) / kParallelChunk;
}

}  // namespace aecrit
