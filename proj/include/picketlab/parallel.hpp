// parallel.hpp - deterministic block-parallel reduction over trial indices.
//
// Trials are split into a fixed number of contiguous blocks that does not
// depend on the worker count; each block is reduced sequentially in index
// order, and the caller combines the per-block partials in block order.
// Results are therefore bit-identical for every PICKETLAB_WORKERS setting.

#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace picketlab {

// Worker count: PICKETLAB_WORKERS if set to a positive integer, otherwise
// the available hardware parallelism (at least 1).
int worker_count();

struct BlockRange {
    long long begin = 0;
    long long end = 0;  // half-open
};

// Contiguous cover of [0, count) by at most `target_blocks` blocks.
std::vector<BlockRange> block_ranges(long long count, long long target_blocks = 256);

// Evaluates fn(range) for every block, distributing blocks over workers, and
// returns the partials indexed by block.  fn must not touch shared state.
template <typename Partial, typename BlockFn>
std::vector<Partial> map_blocks(long long count, BlockFn fn, long long target_blocks = 256) {
    const std::vector<BlockRange> ranges = block_ranges(count, target_blocks);
    std::vector<Partial> partials(ranges.size());
    const int workers = std::min<long long>(worker_count(),
                                            static_cast<long long>(ranges.size()));
    if (workers <= 1) {
        for (std::size_t b = 0; b < ranges.size(); ++b)
            partials[b] = fn(ranges[b]);
        return partials;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next.fetch_add(1); b < ranges.size(); b = next.fetch_add(1))
                partials[b] = fn(ranges[b]);
        });
    }
    for (std::thread& t : pool)
        t.join();
    return partials;
}

}  // namespace picketlab
