#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mixgap/circuit.hpp"
#include "mixgap/matrix.hpp"
#include "mixgap/rational.hpp"

namespace mixgap {

// How many inputs map to each output value, indexed by output pattern
// (length 2^out_bits). Enumerates all 2^in_bits inputs.
std::vector<uint64_t> preimage_counts(const SamplerCircuit& c, uint32_t in_cap = 24);

// The induced distribution p(w) = |C^-1(w)| / 2^in over the full output cube.
Distribution circuit_distribution(const SamplerCircuit& c, uint32_t in_cap = 24);

// N(t) = #{w : |C^-1(w)| >= t and |C'^-1(w)| >= t}.
uint64_t preimage_profile_n(const std::vector<uint64_t>& counts_c,
                            const std::vector<uint64_t>& counts_cp, uint64_t t);

// A pair of samplers over a common input width, with cached tables. The
// protocol machinery works from this prepared form.
struct SamplerPair {
  SamplerCircuit c;
  SamplerCircuit cp;
  std::vector<uint64_t> counts_c;    // per output pattern
  std::vector<uint64_t> counts_cp;
  std::vector<uint64_t> table_c;     // output per input
  std::vector<uint64_t> table_cp;
  // inputs grouped by output: preimages_c[w] lists inputs with C(r) = w,
  // ascending. Built lazily by prepare().
  std::vector<std::vector<uint64_t>> preimages_c;
  std::vector<std::vector<uint64_t>> preimages_cp;

  uint32_t in_bits() const { return c.in_bits; }
  uint32_t out_bits() const { return c.out_bits; }
  uint64_t n_of(uint64_t t) const { return preimage_profile_n(counts_c, counts_cp, t); }
  Rational exact_tv() const;

  static SamplerPair prepare(SamplerCircuit c, SamplerCircuit cp, uint32_t in_cap = 24);
};

// Telescoped preimage-profile sum: sum_t t (N(t) - N(t+1)), which must equal
// (1 - d_tv) 2^in. Returns the distance recovered from the sum.
Rational distance_via_profile(const SamplerPair& pair);
BigInt profile_sum(const SamplerPair& pair);  // the raw sum

// Quantized bracketing of (1 - d_tv) 2^in: level thresholds are
// ceil((1-delta)^-i) for i = 0..levels, with level count ceil(e*in/delta).
struct SandwichResult {
  Rational lower;
  Rational upper;
  uint64_t levels;
  std::vector<uint64_t> n_values;  // N_i per level (N_{levels+1} = 0)
};
SandwichResult quantized_sandwich(const SamplerPair& pair, const Rational& delta);

uint64_t sandwich_levels(uint32_t in_bits, const Rational& delta);
// ceil((1-delta)^-i), saturating above 2^in + 1.
uint64_t level_threshold(const Rational& delta, uint64_t i, uint32_t in_bits);

// XOR product pair: sample k sub-samples with the choice bits conditioned on
// even (first circuit) or odd (second) parity; TV distance becomes d^k.
std::pair<SamplerCircuit, SamplerCircuit> amplify_distance(const SamplerCircuit& c,
                                                           const SamplerCircuit& cp,
                                                           uint32_t k,
                                                           uint32_t width_cap = 24);

// Least k with (c/s)^k > 3, for reducing SD_{c,s} to the small-gap regime.
uint32_t amplification_exponent(const Rational& c_thresh, const Rational& s_thresh);

// Sampler with prescribed preimage counts: consecutive input intervals map
// to the listed outputs. Counts must sum to 2^in_bits.
SamplerCircuit sampler_from_counts(uint32_t in_bits, uint32_t out_bits,
                                   const std::vector<std::pair<uint64_t, uint64_t>>& spec);

}  // namespace mixgap
