#include "mixgap/sd_core.hpp"

#include <algorithm>
#include <stdexcept>

namespace mixgap {

std::vector<uint64_t> preimage_counts(const SamplerCircuit& c, uint32_t in_cap) {
  if (c.in_bits > in_cap)
    throw std::length_error("preimage_counts: input width exceeds enumeration cap");
  std::vector<uint64_t> table = c.body.truth_table(in_cap);
  std::vector<uint64_t> counts(1ULL << c.out_bits, 0);
  for (uint64_t y : table) ++counts[y];
  return counts;
}

Distribution circuit_distribution(const SamplerCircuit& c, uint32_t in_cap) {
  std::vector<uint64_t> counts = preimage_counts(c, in_cap);
  Distribution d;
  d.space = std::make_shared<StateSpace>(StateSpace::full_cube(c.out_bits));
  d.mass.resize(counts.size());
  BigInt total = BigInt(1) << c.in_bits;
  for (size_t w = 0; w < counts.size(); ++w) d.mass[w] = Rational(counts[w], total);
  return d;
}

uint64_t preimage_profile_n(const std::vector<uint64_t>& counts_c,
                            const std::vector<uint64_t>& counts_cp, uint64_t t) {
  uint64_t n = 0;
  for (size_t w = 0; w < counts_c.size(); ++w)
    if (counts_c[w] >= t && counts_cp[w] >= t) ++n;
  return n;
}

SamplerPair SamplerPair::prepare(SamplerCircuit c, SamplerCircuit cp, uint32_t in_cap) {
  if (c.in_bits != cp.in_bits)
    throw std::invalid_argument("sampler pair: input widths differ (pad the narrower)");
  if (c.out_bits != cp.out_bits)
    throw std::invalid_argument("sampler pair: output widths differ");
  SamplerPair p;
  p.table_c = c.body.truth_table(in_cap);
  p.table_cp = cp.body.truth_table(in_cap);
  p.counts_c.assign(1ULL << c.out_bits, 0);
  p.counts_cp.assign(1ULL << c.out_bits, 0);
  for (uint64_t y : p.table_c) ++p.counts_c[y];
  for (uint64_t y : p.table_cp) ++p.counts_cp[y];
  p.preimages_c.resize(1ULL << c.out_bits);
  p.preimages_cp.resize(1ULL << c.out_bits);
  for (uint64_t r = 0; r < p.table_c.size(); ++r) p.preimages_c[p.table_c[r]].push_back(r);
  for (uint64_t r = 0; r < p.table_cp.size(); ++r) p.preimages_cp[p.table_cp[r]].push_back(r);
  p.c = std::move(c);
  p.cp = std::move(cp);
  return p;
}

Rational SamplerPair::exact_tv() const {
  BigInt sum = 0;
  for (size_t w = 0; w < counts_c.size(); ++w) {
    int64_t diff = static_cast<int64_t>(counts_c[w]) - static_cast<int64_t>(counts_cp[w]);
    sum += diff < 0 ? -diff : diff;
  }
  return Rational(sum, BigInt(2) * (BigInt(1) << in_bits()));
}

BigInt profile_sum(const SamplerPair& pair) {
  // sum_{t>=1} t (N(t) - N(t+1)). N changes only at realized min-counts, so
  // walk the sorted mins instead of every t up to 2^in.
  std::vector<uint64_t> mins;
  mins.reserve(pair.counts_c.size());
  for (size_t w = 0; w < pair.counts_c.size(); ++w)
    mins.push_back(std::min(pair.counts_c[w], pair.counts_cp[w]));
  std::sort(mins.begin(), mins.end());
  const uint64_t n_elems = mins.size();
  BigInt sum = 0;
  size_t idx = 0;
  while (idx < mins.size()) {
    size_t jdx = idx;
    while (jdx < mins.size() && mins[jdx] == mins[idx]) ++jdx;
    if (mins[idx] >= 1) {
      uint64_t n_at_t = n_elems - idx;   // N(mins[idx])
      uint64_t n_after = n_elems - jdx;  // N(mins[idx] + 1)
      sum += BigInt(mins[idx]) * (n_at_t - n_after);
    }
    idx = jdx;
  }
  return sum;
}

Rational distance_via_profile(const SamplerPair& pair) {
  BigInt total = BigInt(1) << pair.in_bits();
  // sum = (1 - d) 2^in  =>  d = 1 - sum / 2^in.
  return 1 - Rational(profile_sum(pair), total);
}

uint64_t sandwich_levels(uint32_t in_bits, const Rational& delta) {
  // ceil(e n / delta); overshooting e only adds all-zero tail levels.
  Rational e_hi(27182818284590456ULL, 10000000000000000ULL);
  Rational levels = e_hi * in_bits / delta;
  return ceil_rational(levels).convert_to<uint64_t>();
}

uint64_t level_threshold(const Rational& delta, uint64_t i, uint32_t in_bits) {
  uint64_t cap = (1ULL << in_bits) + 1;
  Rational base = 1 / (1 - delta);
  Rational v = 1;
  for (uint64_t k = 0; k < i; ++k) {
    v *= base;
    if (v > cap) return cap;
  }
  BigInt c = ceil_rational(v);
  if (c > cap) return cap;
  return c.convert_to<uint64_t>();
}

SandwichResult quantized_sandwich(const SamplerPair& pair, const Rational& delta) {
  if (delta <= 0 || delta > Rational(1, 3))
    throw std::invalid_argument("quantized_sandwich: delta must lie in (0, 1/3]");
  SandwichResult res;
  res.levels = sandwich_levels(pair.in_bits(), delta);
  res.n_values.resize(res.levels + 2, 0);
  for (uint64_t i = 0; i <= res.levels; ++i)
    res.n_values[i] = pair.n_of(level_threshold(delta, i, pair.in_bits()));
  res.n_values[res.levels + 1] = 0;

  Rational inv = 1 / (1 - delta);
  Rational weight = 1;  // (1-delta)^-i
  res.lower = 0;
  res.upper = 0;
  for (uint64_t i = 0; i <= res.levels; ++i) {
    Rational diff = Rational(res.n_values[i]) - Rational(res.n_values[i + 1]);
    res.lower += diff * weight;
    res.upper += diff * weight * inv;
    weight *= inv;
  }
  return res;
}

std::pair<SamplerCircuit, SamplerCircuit> amplify_distance(const SamplerCircuit& c,
                                                           const SamplerCircuit& cp,
                                                           uint32_t k, uint32_t width_cap) {
  if (k == 0) throw std::invalid_argument("amplify_distance: k must be positive");
  if (c.out_bits != cp.out_bits)
    throw std::invalid_argument("amplify_distance: output widths differ");
  uint32_t block = std::max(c.in_bits, cp.in_bits);
  uint64_t in_width = static_cast<uint64_t>(k - 1) + static_cast<uint64_t>(k) * block;
  if (in_width > width_cap)
    throw std::length_error("amplify_distance: combined width exceeds cap");

  // Inputs: k-1 free choice bits, then k randomness blocks. The k-th choice
  // bit is forced so the overall parity equals sigma; each block is fed to
  // whichever sampler its choice bit selects.
  auto build = [&](bool sigma) {
    CircuitBuilder b(static_cast<uint32_t>(in_width));
    uint32_t parity_rest;
    if (k == 1) {
      parity_rest = b.constant(false);
    } else {
      uint32_t acc = 0;  // first free choice bit's wire
      for (uint32_t i = 1; i + 1 < k; ++i) acc = b.wxor(acc, i);
      parity_rest = acc;
    }
    uint32_t last_choice = sigma ? b.wnot(parity_rest) : parity_rest;

    auto splice = [&](const SamplerCircuit& s, uint32_t base) {
      std::vector<uint32_t> wire_map(s.body.inputs() + s.body.gates().size());
      for (uint32_t i = 0; i < s.in_bits; ++i) wire_map[i] = base + i;
      uint32_t w = s.in_bits;
      for (const Gate& g : s.body.gates()) {
        uint32_t nw;
        switch (g.op) {
          case GateOp::And: nw = b.wand(wire_map[g.a], wire_map[g.b]); break;
          case GateOp::Or: nw = b.wor(wire_map[g.a], wire_map[g.b]); break;
          case GateOp::Not: nw = b.wnot(wire_map[g.a]); break;
          case GateOp::Xor: nw = b.wxor(wire_map[g.a], wire_map[g.b]); break;
          case GateOp::Const0: nw = b.constant(false); break;
          default: nw = b.constant(true); break;
        }
        wire_map[w++] = nw;
      }
      std::vector<uint32_t> outputs;
      for (uint32_t o : s.body.outputs()) outputs.push_back(wire_map[o]);
      return outputs;
    };

    std::vector<uint32_t> outs;
    for (uint32_t copy = 0; copy < k; ++copy) {
      uint32_t sel = copy + 1 < k ? copy : last_choice;
      uint32_t base = (k - 1) + copy * block;
      std::vector<uint32_t> out_c = splice(c, base);
      std::vector<uint32_t> out_cp = splice(cp, base);
      for (uint32_t bit = 0; bit < c.out_bits; ++bit)
        outs.push_back(b.mux(sel, out_cp[bit], out_c[bit]));  // sel = 1 picks C'
    }
    return SamplerCircuit{static_cast<uint32_t>(in_width), k * c.out_bits,
                          std::move(b).finish(std::move(outs))};
  };
  return {build(false), build(true)};
}

uint32_t amplification_exponent(const Rational& c_thresh, const Rational& s_thresh) {
  if (s_thresh <= 0) return 1;
  if (c_thresh <= s_thresh) throw std::invalid_argument("amplification: requires c > s");
  Rational ratio = c_thresh / s_thresh;
  Rational pow = 1;
  for (uint32_t k = 1; k <= 128; ++k) {
    pow *= ratio;
    if (pow > 3) return k;
  }
  throw std::domain_error("amplification: ratio too close to 1");
}

SamplerCircuit sampler_from_counts(uint32_t in_bits, uint32_t out_bits,
                                   const std::vector<std::pair<uint64_t, uint64_t>>& spec) {
  if (in_bits > 24) throw std::length_error("sampler_from_counts: input width too large");
  uint64_t total = 0;
  for (const auto& [w, cnt] : spec) {
    if (out_bits < 64 && w >= (1ULL << out_bits))
      throw std::invalid_argument("sampler_from_counts: output exceeds out_bits");
    total += cnt;
  }
  if (total != (1ULL << in_bits))
    throw std::invalid_argument("sampler_from_counts: counts must sum to 2^in_bits");

  CircuitBuilder b(in_bits);
  std::vector<uint32_t> rand_wires(in_bits);
  for (uint32_t i = 0; i < in_bits; ++i) rand_wires[i] = i;
  std::vector<std::vector<uint32_t>> bit_conds(out_bits);
  uint64_t cum = 0;
  for (const auto& [w, cnt] : spec) {
    if (cnt == 0) continue;
    uint64_t lo = cum, hi = cum + cnt;
    cum = hi;
    if (w == 0) continue;  // all-zero output needs no gates
    uint32_t cond = 0;
    bool have = false;
    if (lo > 0) {
      cond = b.wnot(b.less_const(rand_wires, lo));
      have = true;
    }
    if (hi < (1ULL << in_bits)) {
      uint32_t upper = b.less_const(rand_wires, hi);
      cond = have ? b.wand(cond, upper) : upper;
      have = true;
    }
    if (!have) cond = b.constant(true);
    for (uint32_t bit = 0; bit < out_bits; ++bit)
      if ((w >> bit) & 1) bit_conds[bit].push_back(cond);
  }
  std::vector<uint32_t> outs(out_bits);
  for (uint32_t bit = 0; bit < out_bits; ++bit) outs[bit] = b.wor_many(bit_conds[bit]);
  return SamplerCircuit{in_bits, out_bits, std::move(b).finish(std::move(outs))};
}

}  // namespace mixgap
