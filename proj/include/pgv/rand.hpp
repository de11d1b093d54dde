#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pgv {

// Deterministic splitmix64 stream; identical sequences on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n), n > 0, via rejection
  uint64_t below(uint64_t n) {
    uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = next();
    } while (v >= lim);
    return v % n;
  }

  long range(long lo, long hi) {  // inclusive
    return lo + (long)below((uint64_t)(hi - lo + 1));
  }

  bool coin() { return next() & 1; }

 private:
  uint64_t state_;
};

// Stable per-task seed derivation: fnv1a of the tag mixed into the master
// seed, so parallel tasks draw independent reproducible streams.
inline uint64_t derive_seed(uint64_t master, std::string_view tag) {
  uint64_t h = 1469598103934665603ull ^ master;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h ^ (master << 1);
}

}  // namespace pgv
