#pragma once

#include <cstddef>
#include <functional>

namespace splab {

/// Worker count used by the parallel helpers; 0 selects hardware concurrency.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Runs body(begin, end) over contiguous blocks covering [0, count).
/// Blocks are fixed by count and thread count only, so any per-block
/// reduction done by the caller in block order is deterministic.
void parallel_blocks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t min_block = 4096);

/// Dynamic scheduling of independent jobs 0..count-1 (work-stealing via a shared counter).
void parallel_jobs(std::size_t count, const std::function<void(std::size_t)>& job);

}  // namespace splab
