#include "dobgibbs/rng.hpp"

namespace dobgibbs {

// Chained avalanche over the components.  Each stage folds one coordinate in
// with a distinct additive constant so that permuting components cannot give
// the same key.
uint64_t derive_key(uint64_t master, uint64_t lane, uint64_t replica,
                    uint64_t sweep, uint64_t site) {
  uint64_t k = mix64(master ^ 0x6A09E667F3BCC909ull);
  k = mix64(k ^ (lane + 0xBB67AE8584CAA73Bull));
  k = mix64(k ^ (replica + 0x3C6EF372FE94F82Bull));
  k = mix64(k ^ (sweep + 0xA54FF53A5F1D36F1ull));
  k = mix64(k ^ (site + 0x510E527FADE682D1ull));
  return k;
}

}  // namespace dobgibbs
