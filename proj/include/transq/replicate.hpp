#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "transq/rng.hpp"

namespace transq {

// 0 means one worker per hardware thread.
inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Seed of an independent family of streams under `master` (e.g. the diffusion
// side of a two-simulator comparison).
inline std::uint64_t family_seed(std::uint64_t master, std::uint64_t family) {
    return stream_seed(master, 0x8000000000000000ULL + family);
}

/// Runs fn(rng, i) for i in [0, count) with rng seeded by stream_seed(seed, i).
///
/// Work is handed out through an atomic counter; results land in slot i, so
/// the returned vector does not depend on the number of threads. If any
/// replication throws, the exception of the lowest failing index is rethrown.
template <class Result, class Fn>
std::vector<Result> replicate(std::size_t count, std::uint64_t seed, unsigned threads, Fn&& fn) {
    std::vector<Result> out(count);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr error;
    std::size_t error_index = count;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                Rng rng(stream_seed(seed, i));
                out[i] = fn(rng, i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace transq
