#pragma once

#include <cstdint>

namespace mixgap {

// SplitMix64 finalizer. Good avalanche, cheap, stateless.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-mode draw keyed by up to four words. Chain trajectories use
// (seed, state index, trial, step) so parallel and sequential runs see
// identical randomness.
inline uint64_t counter_rand(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

// Sequential stream for protocol transcripts: position-addressable, so a
// round is reproducible from (seed, round) alone.
class Stream64 {
 public:
  explicit Stream64(uint64_t seed, uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream))), ctr_(0) {}

  uint64_t next() { return mix64(key_ ^ ctr_++); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), unbiased.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      uint64_t v = next();
      if (v >= threshold) return v % n;
    }
  }

  // k uniform random bits, k <= 64.
  uint64_t bits(unsigned k) {
    return k == 0 ? 0 : (next() >> (64 - k));
  }

 private:
  uint64_t key_;
  uint64_t ctr_;
};

}  // namespace mixgap
