#include "dobgibbs/util.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dobgibbs {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex16(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void parallel_blocks(uint64_t n_items, uint64_t block_size, int threads,
                     const std::function<void(uint64_t, uint64_t, uint64_t)>& fn) {
  if (block_size == 0) throw std::invalid_argument("parallel_blocks: block_size == 0");
  const uint64_t n_blocks = (n_items + block_size - 1) / block_size;
  if (threads <= 1 || n_blocks <= 1) {
    for (uint64_t b = 0; b < n_blocks; ++b) {
      const uint64_t begin = b * block_size;
      fn(b, begin, std::min(begin + block_size, n_items));
    }
    return;
  }
  std::atomic<uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const uint64_t begin = b * block_size;
      fn(b, begin, std::min(begin + block_size, n_items));
    }
  };
  std::vector<std::thread> pool;
  const int use = std::min<uint64_t>(threads, n_blocks);
  pool.reserve(use);
  for (int t = 0; t < use; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DOBRUSHIN_GIBBS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace dobgibbs
