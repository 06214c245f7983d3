#pragma once

#include <cstdint>
#include <vector>

#include "mixgap/rng.hpp"

namespace mixgap {

// Affine map over GF(2): h(x) = Mx ^ v with a random bit matrix M and offset
// v. Pairwise independent: for x != y the pair (h(x), h(y)) is uniform.
struct AffineHash {
  uint32_t in_bits = 0;
  uint32_t out_bits = 0;
  std::vector<uint64_t> rows;  // row i is the mask of M's row i
  uint64_t offset = 0;

  uint64_t operator()(uint64_t x) const {
    uint64_t y = offset;
    for (uint32_t i = 0; i < out_bits; ++i)
      y ^= static_cast<uint64_t>(__builtin_parityll(rows[i] & x)) << i;
    return y;
  }

  static AffineHash sample(Stream64& rng, uint32_t in_bits, uint32_t out_bits) {
    AffineHash h;
    h.in_bits = in_bits;
    h.out_bits = out_bits;
    h.rows.resize(out_bits);
    for (uint32_t i = 0; i < out_bits; ++i) h.rows[i] = rng.bits(in_bits);
    h.offset = rng.bits(out_bits);
    return h;
  }

  // The degenerate 0-bit hash maps everything to the empty string (0).
  static AffineHash trivial(uint32_t in_bits) { return AffineHash{in_bits, 0, {}, 0}; }
};

}  // namespace mixgap
