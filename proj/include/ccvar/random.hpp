#ifndef CCVAR_RANDOM_HPP
#define CCVAR_RANDOM_HPP

// Seeded random streams. Work is cut into fixed-size blocks and every block gets
// its own engine seeded from (seed, block index), so results do not depend on
// how blocks are distributed over threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace ccvar {

using Engine = std::mt19937_64;

inline constexpr std::size_t kBlockSize = 4096;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent engine for sub-stream `stream` of `seed`.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Engine(seq);
}

/// Uniform on the open interval (0, 1), 53-bit resolution.
inline double uniform_open(Engine& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Engine& rng) { return -std::log(uniform_open(rng)); }

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(block_index, begin, end) over [0, n) in blocks of kBlockSize.
/// Blocks are dealt round-robin to worker threads.
/// body(k) for k in [0, count), task k on worker k mod workers. The first exception
/// thrown by any worker is rethrown after all workers join.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    auto run = [&](unsigned w) {
        for (std::size_t k = w; k < count; k += workers) body(k);
    };
    if (workers <= 1) {
        if (count > 0) run(0);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    run(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline void for_each_block(std::size_t n, unsigned threads,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    parallel_for(blocks, threads, [&](std::size_t b) { body(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize)); });
}

} // namespace ccvar

#endif
