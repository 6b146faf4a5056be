#include "picketlab/parallel.hpp"

#include <algorithm>
#include <string>

namespace picketlab {

int worker_count() {
    if (const char* env = std::getenv("PICKETLAB_WORKERS")) {
        try {
            const int parsed = std::stoi(std::string(env));
            if (parsed >= 1)
                return parsed;
        } catch (...) {
            // fall through to hardware default on unparsable values
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<BlockRange> block_ranges(long long count, long long target_blocks) {
    std::vector<BlockRange> ranges;
    if (count <= 0)
        return ranges;
    const long long blocks = std::clamp<long long>(target_blocks, 1, count);
    const long long base = count / blocks;
    const long long extra = count % blocks;
    long long begin = 0;
    for (long long b = 0; b < blocks; ++b) {
        const long long size = base + (b < extra ? 1 : 0);
        ranges.push_back(BlockRange{begin, begin + size});
        begin += size;
    }
    return ranges;
}

}  // namespace picketlab
