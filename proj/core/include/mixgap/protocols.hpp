#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixgap/hash.hpp"
#include "mixgap/rational.hpp"
#include "mixgap/sd_core.hpp"

namespace mixgap {

// Protocol constants: the paper profile uses 54 and 5000 in the quota and
// hash-width formulas; the desk profile scales them to 6 and 50 so the
// quotas fit instances a desk machine can enumerate. Every report records
// which profile ran.
enum class ConstProfile { Paper, Desk };

struct ProtocolParams {
  Rational delta;
  ConstProfile profile = ConstProfile::Desk;
  // Quota d reads "(1 - delta2/2) K2/delta^4" with plain delta when true,
  // the delta2-form otherwise (both readings of the same display).
  bool quota_d_plain_delta = false;
  // Insist delta1 = delta2 = delta; throws unless both logs are integral.
  bool force_equal_deltas = false;

  uint32_t k1() const { return profile == ConstProfile::Paper ? 54 : 6; }
  uint32_t k2() const { return profile == ConstProfile::Paper ? 5000 : 50; }
};

// Widths and quotas for one lower-bound execution certifying N(t) >= n_claim:
//   a = log2(delta1^2 n_claim / K1), quota c = floor((1 - delta1/2) K1/delta1^2)
//   b = log2(delta2^4 t / K2),       quota d = floor((1 - delta2/2) K2/delta2^4)
// delta1, delta2 are the largest values <= delta making the logs integral.
// Widths that would go negative clamp to 0: the hash disappears and the
// quota drops to what direct exhibition can prove.
struct LowerBoundLayout {
  uint32_t a = 0;
  uint32_t b = 0;
  uint64_t c_quota = 0;
  uint64_t d_quota = 0;
  double delta1 = 0;
  double delta2 = 0;
  bool delta1_exact = false;  // delta1 == delta as rationals
  bool delta2_exact = false;
  bool a_degenerate = false;  // clamped
  bool b_degenerate = false;
};

LowerBoundLayout lower_bound_layout(const ProtocolParams& params, uint64_t n_claim,
                                    uint64_t t_thresh);

// ---- The two-message distinguishing protocol ----

// Labeling strategy: labels[w] = 1 means the prover answers "first circuit"
// on sample w.
std::vector<uint8_t> am_honest_strategy(const SamplerPair& pair);
std::vector<uint8_t> am_strategy_from_mask(uint32_t out_bits, uint64_t mask);

// Acceptance probability computed by exact summation (no sampling).
Rational am_sd_acceptance(const SamplerPair& pair, const std::vector<uint8_t>& labels);

struct AmRound {
  bool accepted = false;
  bool coin_first = false;  // verifier sampled from the first circuit
  uint64_t sample = 0;
};
AmRound am_sd_round(const SamplerPair& pair, const std::vector<uint8_t>& labels,
                    uint64_t seed);

// ---- The set lower-bound protocol ----

enum class GsProver { Honest, Greedy };

struct GsTranscript {
  LowerBoundLayout layout;
  AffineHash g, h;
  std::vector<uint64_t> omegas;
  std::vector<std::vector<uint64_t>> rs;   // preimages under C, per omega
  std::vector<std::vector<uint64_t>> rps;  // preimages under C'
  bool accepted = false;
  std::string reject_reason;
};

// One four-message execution certifying N(t_thresh) >= n_claim.
GsTranscript gs_lower_bound_round(const SamplerPair& pair, uint64_t t_thresh,
                                  uint64_t n_claim, const ProtocolParams& params,
                                  GsProver prover, uint64_t seed);

// Majority vote over k_rep parallel rounds; k_rep = 0 derives the count from
// a Chernoff bound for error delta/(20 n), n being the circuit input width.
struct AmplifiedOutcome {
  uint32_t k_rep = 0;
  uint32_t accept_count = 0;
  bool accepted = false;
};
AmplifiedOutcome amplified_lower_bound(const SamplerPair& pair, uint64_t t_thresh,
                                       uint64_t n_claim, const ProtocolParams& params,
                                       GsProver prover, uint64_t seed, uint32_t k_rep = 0);
uint32_t amplification_rounds(const Rational& delta, uint32_t n_bits);

// ---- The composed protocol for small statistical distance ----

// Claim strategies: Honest sends the true N_i; the adversarial suite covers
// the soundness proof's failure modes (uniform inflation, single-level
// inflation, level shifting, tail truncation).
enum class CoamProver { Honest, InflateAll, InflateOne, ShiftLevels, ZeroTail };

struct CoamOutcome {
  bool accepted = false;
  bool claims_malformed = false;
  int64_t failed_level = -1;  // first rejecting subprotocol
  uint64_t levels = 0;
  std::vector<uint64_t> claims;
  Rational final_sum;
  Rational threshold;  // (1-delta)^2 2^n
};

// Accepts when it believes d_tv(p, p') <= delta (sound against > 3 delta).
CoamOutcome coam_sd_round(const SamplerPair& pair, const Rational& delta,
                          CoamProver prover, uint64_t seed, const ProtocolParams& params,
                          uint32_t sub_k_rep = 1);

std::vector<uint64_t> coam_claims(const SamplerPair& pair, const Rational& delta,
                                  CoamProver prover);

}  // namespace mixgap
