#pragma once
#include <cstdint>

namespace dobgibbs {

// 64-bit avalanche mix (splitmix64 finalizer).
constexpr uint64_t mix64(uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Counter-based uniform stream: value k is mix64(key + k*gamma).  No state
// beyond the counter, so any substream can be reconstructed from its key.
class SubStream {
 public:
  explicit SubStream(uint64_t key) : key_(key) {}

  uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGamma); }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  uint64_t consumed() const { return ctr_; }

 private:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  uint64_t key_;
  uint64_t ctr_ = 0;
};

// Lanes keep unrelated consumers (chain updates, initial draws, auxiliary
// estimates) off each other's uniforms even at equal (replica, sweep, site).
enum class Lane : uint64_t {
  kChain = 1,
  kInit = 2,
  kAux = 3,
  kMarginal = 4,
};

uint64_t derive_key(uint64_t master, uint64_t lane, uint64_t replica,
                    uint64_t sweep, uint64_t site);

inline SubStream substream(uint64_t master, Lane lane, uint64_t replica,
                           uint64_t sweep, uint64_t site) {
  return SubStream(derive_key(master, static_cast<uint64_t>(lane), replica, sweep, site));
}

}  // namespace dobgibbs
