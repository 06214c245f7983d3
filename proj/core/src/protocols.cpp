#include "mixgap/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mixgap/rng.hpp"

namespace mixgap {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

// floor(log2(q)) for rational q >= 1; -1 when q < 1.
int64_t floor_log2(const Rational& q) {
  if (q < 1) return -1;
  int64_t a = 0;
  Rational v = q;
  while (v >= 2) {
    v /= 2;
    ++a;
  }
  return a;
}

BigFloat to_bigfloat(const Rational& r) {
  return BigFloat(numerator(r)) / BigFloat(denominator(r));
}

// floor((1 - root/2) * base) where root = (target)^(1/order), both exact
// rationals. Exact when root is rational (the aligned case); otherwise
// evaluated at 100 decimal digits, far beyond any quota magnitude here.
uint64_t quota_floor(const Rational& base, const Rational& target, unsigned order) {
  // Try the exact path: target = r^order for rational r?
  BigInt tn = numerator(target), td = denominator(target);
  auto iroot = [&](const BigInt& v) -> std::pair<BigInt, bool> {
    if (v < 0) return {0, false};
    BigInt r;
    if (order == 2)
      r = sqrt(v);
    else {
      BigFloat est = pow(BigFloat(v), BigFloat(1) / order);
      r = est.convert_to<BigInt>();
      while (pow_bigint(r + 1, order) <= v) ++r;
      while (r > 0 && pow_bigint(r, order) > v) --r;
    }
    return {r, pow_bigint(r, order) == v};
  };
  auto [rn, okn] = iroot(tn);
  auto [rd, okd] = iroot(td);
  if (okn && okd) {
    Rational root(rn, rd);
    Rational q = (1 - root / 2) * base;
    return floor_rational(q).convert_to<uint64_t>();
  }
  BigFloat root = pow(to_bigfloat(target), BigFloat(1) / order);
  BigFloat q = (1 - root / 2) * to_bigfloat(base);
  BigFloat fl = floor(q);
  return fl.convert_to<uint64_t>();
}

}  // namespace

LowerBoundLayout lower_bound_layout(const ProtocolParams& params, uint64_t n_claim,
                                    uint64_t t_thresh) {
  if (n_claim == 0 || t_thresh == 0)
    throw std::invalid_argument("lower bound layout: claim and threshold must be positive");
  const Rational& delta = params.delta;
  if (delta <= 0 || delta > 1)
    throw std::invalid_argument("lower bound layout: delta must lie in (0,1]");
  LowerBoundLayout lay;

  // a side: 2^a = delta1^2 N / K1, delta1 the largest value <= delta with an
  // integral log, i.e. delta1^2 = 2^a K1 / N for a = floor(log2(delta^2 N/K1)).
  Rational qa = delta * delta * n_claim / params.k1();
  int64_t a = floor_log2(qa);
  if (a < 0) {
    lay.a = 0;
    lay.a_degenerate = true;
    lay.delta1 = to_double(delta);
    lay.delta1_exact = true;
    Rational formula = (1 - delta / 2) * (Rational(params.k1()) / (delta * delta));
    uint64_t f = floor_rational(formula).convert_to<uint64_t>();
    lay.c_quota = std::min<uint64_t>(f, n_claim);
  } else {
    lay.a = static_cast<uint32_t>(a);
    Rational d1_sq = Rational(BigInt(1) << lay.a) * params.k1() / n_claim;
    lay.delta1_exact = d1_sq == delta * delta;
    if (params.force_equal_deltas && !lay.delta1_exact)
      throw std::invalid_argument("delta1 != delta: claim size breaks the aligned test mode");
    lay.delta1 = std::sqrt(to_double(d1_sq));
    Rational base = Rational(n_claim, BigInt(1) << lay.a);  // K1/delta1^2
    lay.c_quota = quota_floor(base, d1_sq, 2);
  }

  // b side: 2^b = delta2^4 t / K2.
  Rational qb = pow_rational(delta, 4) * t_thresh / params.k2();
  int64_t b = floor_log2(qb);
  if (b < 0) {
    lay.b = 0;
    lay.b_degenerate = true;
    lay.delta2 = to_double(delta);
    lay.delta2_exact = true;
    Rational formula = (1 - delta / 2) * (Rational(params.k2()) / pow_rational(delta, 4));
    uint64_t f = floor_rational(formula).convert_to<uint64_t>();
    lay.d_quota = std::min<uint64_t>(f, t_thresh);
  } else {
    lay.b = static_cast<uint32_t>(b);
    Rational d2_4 = Rational(BigInt(1) << lay.b) * params.k2() / t_thresh;
    lay.delta2_exact = d2_4 == pow_rational(delta, 4);
    if (params.force_equal_deltas && !lay.delta2_exact)
      throw std::invalid_argument("delta2 != delta: threshold breaks the aligned test mode");
    lay.delta2 = std::pow(to_double(d2_4), 0.25);
    Rational base = params.quota_d_plain_delta
                        ? Rational(params.k2()) / pow_rational(delta, 4)
                        : Rational(t_thresh, BigInt(1) << lay.b);  // K2/delta2^4
    lay.d_quota = quota_floor(base, d2_4, 4);
  }
  return lay;
}

std::vector<uint8_t> am_honest_strategy(const SamplerPair& pair) {
  std::vector<uint8_t> labels(pair.counts_c.size());
  for (size_t w = 0; w < labels.size(); ++w)
    labels[w] = pair.counts_c[w] > pair.counts_cp[w] ? 1 : 0;
  return labels;
}

std::vector<uint8_t> am_strategy_from_mask(uint32_t out_bits, uint64_t mask) {
  std::vector<uint8_t> labels(1ULL << out_bits);
  for (size_t w = 0; w < labels.size(); ++w) labels[w] = (mask >> w) & 1;
  return labels;
}

Rational am_sd_acceptance(const SamplerPair& pair, const std::vector<uint8_t>& labels) {
  if (labels.size() != pair.counts_c.size())
    throw std::invalid_argument("am_sd: strategy does not cover the output space");
  BigInt hits = 0;  // 2^in * 2 * acceptance
  for (size_t w = 0; w < labels.size(); ++w)
    hits += labels[w] ? pair.counts_c[w] : pair.counts_cp[w];
  return Rational(hits, BigInt(2) * (BigInt(1) << pair.in_bits()));
}

AmRound am_sd_round(const SamplerPair& pair, const std::vector<uint8_t>& labels,
                    uint64_t seed) {
  Stream64 rng(seed, /*stream=*/0x5da1);
  AmRound r;
  r.coin_first = rng.next() & 1;
  uint64_t input = rng.bits(pair.in_bits());
  r.sample = r.coin_first ? pair.table_c[input] : pair.table_cp[input];
  bool says_first = labels.at(r.sample) != 0;
  r.accepted = says_first == r.coin_first;
  return r;
}

namespace {

struct ProverMessages {
  std::vector<uint64_t> omegas;
  std::vector<std::vector<uint64_t>> rs, rps;
};

std::vector<uint64_t> choose_omegas(const SamplerPair& pair, uint64_t t_thresh,
                                    const AffineHash& g, GsProver prover, uint64_t quota) {
  std::vector<uint64_t> picked;
  const size_t outs = pair.counts_c.size();
  if (prover == GsProver::Honest) {
    for (uint64_t w = 0; w < outs && picked.size() < quota; ++w)
      if (pair.counts_c[w] >= t_thresh && pair.counts_cp[w] >= t_thresh && g(w) == 0)
        picked.push_back(w);
  } else {
    // Greedy: any hash-zero output, largest joint preimage count first.
    std::vector<uint64_t> cands;
    for (uint64_t w = 0; w < outs; ++w)
      if (g(w) == 0 && std::min(pair.counts_c[w], pair.counts_cp[w]) > 0) cands.push_back(w);
    std::sort(cands.begin(), cands.end(), [&](uint64_t x, uint64_t y) {
      uint64_t mx = std::min(pair.counts_c[x], pair.counts_cp[x]);
      uint64_t my = std::min(pair.counts_c[y], pair.counts_cp[y]);
      if (mx != my) return mx > my;
      return x < y;
    });
    for (uint64_t w : cands) {
      if (picked.size() >= quota) break;
      picked.push_back(w);
    }
  }
  return picked;
}

std::vector<uint64_t> hash_zero_preimages(const std::vector<uint64_t>& preimages,
                                          const AffineHash& h, uint64_t quota) {
  std::vector<uint64_t> out;
  for (uint64_t r : preimages) {
    if (h(r) == 0) out.push_back(r);
    if (out.size() >= quota) break;
  }
  return out;
}

}  // namespace

GsTranscript gs_lower_bound_round(const SamplerPair& pair, uint64_t t_thresh,
                                  uint64_t n_claim, const ProtocolParams& params,
                                  GsProver prover, uint64_t seed) {
  GsTranscript tr;
  if (n_claim == 0) {  // N >= 0 needs no certificate
    tr.accepted = true;
    return tr;
  }
  tr.layout = lower_bound_layout(params, n_claim, t_thresh);
  Stream64 rng(seed, /*stream=*/0x65b0);
  tr.g = AffineHash::sample(rng, pair.out_bits(), tr.layout.a);
  tr.omegas = choose_omegas(pair, t_thresh, tr.g, prover, tr.layout.c_quota);
  if (tr.omegas.size() < tr.layout.c_quota) {
    tr.reject_reason = "prover sent fewer than c values";
    return tr;
  }
  tr.h = AffineHash::sample(rng, pair.in_bits(), tr.layout.b);
  for (uint64_t w : tr.omegas) {
    tr.rs.push_back(hash_zero_preimages(pair.preimages_c[w], tr.h, tr.layout.d_quota));
    tr.rps.push_back(hash_zero_preimages(pair.preimages_cp[w], tr.h, tr.layout.d_quota));
  }

  // Verifier checks; the prover messages above are claims, everything is
  // re-verified against the circuits here.
  std::vector<uint64_t> sorted = tr.omegas;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    tr.reject_reason = "duplicate omega";
    return tr;
  }
  for (size_t i = 0; i < tr.omegas.size(); ++i) {
    uint64_t w = tr.omegas[i];
    if (tr.g(w) != 0) {
      tr.reject_reason = "g(omega) != 0";
      return tr;
    }
    if (tr.rs[i].size() < tr.layout.d_quota || tr.rps[i].size() < tr.layout.d_quota) {
      tr.reject_reason = "prover sent fewer than d preimages";
      return tr;
    }
    for (uint64_t r : tr.rs[i]) {
      if (tr.h(r) != 0 || pair.table_c[r] != w) {
        tr.reject_reason = "bad preimage for C";
        return tr;
      }
    }
    for (uint64_t r : tr.rps[i]) {
      if (tr.h(r) != 0 || pair.table_cp[r] != w) {
        tr.reject_reason = "bad preimage for C'";
        return tr;
      }
    }
  }
  tr.accepted = true;
  return tr;
}

uint32_t amplification_rounds(const Rational& delta, uint32_t n_bits) {
  // Majority of k rounds, each with completeness 2/3 / soundness 1/3; a
  // Hoeffding bound exp(-2k(1/6)^2) <= delta/(20n) gives the count.
  double target = to_double(delta) / (20.0 * std::max(1u, n_bits));
  double k = 18.0 * std::log(1.0 / target);
  uint32_t kr = static_cast<uint32_t>(std::ceil(k));
  if (kr % 2 == 0) ++kr;
  return std::max(1u, kr);
}

AmplifiedOutcome amplified_lower_bound(const SamplerPair& pair, uint64_t t_thresh,
                                       uint64_t n_claim, const ProtocolParams& params,
                                       GsProver prover, uint64_t seed, uint32_t k_rep) {
  AmplifiedOutcome out;
  out.k_rep = k_rep == 0 ? amplification_rounds(params.delta, pair.in_bits()) : k_rep;
  for (uint32_t r = 0; r < out.k_rep; ++r) {
    uint64_t round_seed = mix64(seed ^ mix64(0xa3c59ac2ULL + r));
    if (gs_lower_bound_round(pair, t_thresh, n_claim, params, prover, round_seed).accepted)
      ++out.accept_count;
  }
  out.accepted = 2 * out.accept_count > out.k_rep;
  return out;
}

std::vector<uint64_t> coam_claims(const SamplerPair& pair, const Rational& delta,
                                  CoamProver prover) {
  uint64_t levels = sandwich_levels(pair.in_bits(), delta);
  std::vector<uint64_t> truth(levels + 1);
  for (uint64_t i = 0; i <= levels; ++i)
    truth[i] = pair.n_of(level_threshold(delta, i, pair.in_bits()));

  std::vector<uint64_t> claims = truth;
  switch (prover) {
    case CoamProver::Honest:
      break;
    case CoamProver::InflateAll: {
      Rational inv = 1 / (1 - delta);
      for (auto& c : claims)
        c = ceil_rational(Rational(c) * inv).convert_to<uint64_t>();
      break;
    }
    case CoamProver::InflateOne:
      claims[0] = ceil_rational(Rational(truth[0]) * (1 + delta)).convert_to<uint64_t>() + 1;
      break;
    case CoamProver::ShiftLevels:
      for (uint64_t i = levels; i >= 1; --i) claims[i] = truth[i - 1];
      break;
    case CoamProver::ZeroTail:
      for (uint64_t i = levels / 2; i <= levels; ++i) claims[i] = 0;
      break;
  }
  return claims;
}

CoamOutcome coam_sd_round(const SamplerPair& pair, const Rational& delta,
                          CoamProver prover, uint64_t seed, const ProtocolParams& params,
                          uint32_t sub_k_rep) {
  if (delta <= 0 || delta > Rational(1, 3))
    throw std::invalid_argument("coam_sd_round: delta must lie in (0, 1/3]");
  CoamOutcome out;
  out.levels = sandwich_levels(pair.in_bits(), delta);
  out.claims = coam_claims(pair, delta, prover);

  for (uint64_t i = 1; i < out.claims.size(); ++i)
    if (out.claims[i] > out.claims[i - 1]) {
      out.claims_malformed = true;
      return out;
    }

  ProtocolParams sub = params;
  sub.delta = delta;
  for (uint64_t i = 1; i <= out.levels; ++i) {
    if (out.claims[i] == 0) continue;
    uint64_t t_i = level_threshold(delta, i, pair.in_bits());
    uint64_t sub_seed = mix64(seed ^ mix64(0xc0a31eadULL + i));
    bool ok =
        sub_k_rep <= 1
            ? gs_lower_bound_round(pair, t_i, out.claims[i], sub,
                                   prover == CoamProver::Honest ? GsProver::Honest
                                                                : GsProver::Greedy,
                                   sub_seed)
                  .accepted
            : amplified_lower_bound(pair, t_i, out.claims[i], sub,
                                    prover == CoamProver::Honest ? GsProver::Honest
                                                                 : GsProver::Greedy,
                                    sub_seed, sub_k_rep)
                  .accepted;
    if (!ok) {
      out.failed_level = static_cast<int64_t>(i);
      return out;
    }
  }

  Rational inv = 1 / (1 - delta);
  Rational weight = 1;
  out.final_sum = 0;
  for (uint64_t i = 0; i <= out.levels; ++i) {
    uint64_t next = i + 1 <= out.levels ? out.claims[i + 1] : 0;
    out.final_sum += (Rational(out.claims[i]) - Rational(next)) * weight;
    weight *= inv;
  }
  out.threshold = pow_rational(1 - delta, 2) * Rational(BigInt(1) << pair.in_bits());
  out.accepted = out.final_sum >= out.threshold;
  return out;
}

}  // namespace mixgap
