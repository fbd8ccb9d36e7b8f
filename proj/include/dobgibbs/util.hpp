#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace dobgibbs {

// Shortest decimal string that round-trips a double (17 significant digits).
std::string fmt17(double v);

// FNV-1a 64-bit hash; used for config provenance stamps.
uint64_t fnv1a64(std::string_view data);

std::string hex16(uint64_t v);

// Runs fn(block_index, begin, end) over [0, n_items) split into fixed blocks
// of `block_size`.  Blocks are claimed dynamically by `threads` workers, so
// each block index always covers the same item range regardless of thread
// count; callers merge per-block partials in block order to stay
// deterministic.  threads <= 1 runs inline.
void parallel_blocks(uint64_t n_items, uint64_t block_size, int threads,
                     const std::function<void(uint64_t, uint64_t, uint64_t)>& fn);

// Resolves a thread count: explicit argument wins, then the
// DOBRUSHIN_GIBBS_THREADS environment variable, then 1.
int resolve_threads(int requested);

}  // namespace dobgibbs
