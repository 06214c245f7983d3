#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixgap/circuit.hpp"
#include "mixgap/matrix.hpp"
#include "mixgap/mixing.hpp"
#include "mixgap/sd_core.hpp"

namespace mixgap {

enum class PromiseKind { Gptcs, Gptc, Gtc };

const char* promise_kind_name(PromiseKind k);
PromiseKind promise_kind_from_name(const std::string& name);

// A convergence-testing instance. GPTCS/GPTC carry t and t_max with unary
// semantics (magnitude bounds allowed work); GTC's t is a plain binary
// number that may be astronomically large.
struct PromiseInstance {
  PromiseKind kind = PromiseKind::Gtc;
  std::optional<ChainCircuit> circuit;
  std::optional<TransitionMatrix> matrix;
  uint64_t start_pattern = 0;
  uint64_t t = 1;
  std::optional<uint64_t> t_max;
  Rational gap_c = 1;   // c >= 1
  Rational delta = 0;   // in [0, 1/4)
  std::string gadget;   // provenance: "", "sd-chain", "unsat", "tm"
  std::map<std::string, std::string> gadget_params;

  const TransitionMatrix& require_matrix() const;
  // Build (and cache) the matrix from the circuit when absent.
  const TransitionMatrix& materialize_matrix(const ReachOptions& opts = {});
  uint32_t start_index() const;
};

// ---- The product-refresh gadget (sampler pair -> chain) ----

// Chain on [m] x {0,1}^n: coordinate z refreshes uniformly each step; the
// y coordinate resamples from the first distribution when z = 0, from the
// second when z = 1, and holds otherwise. Start state (z=0, y=0^n).
// The state space is the reachable closure from the start.
struct SdChainGadget {
  PromiseInstance instance;
  Distribution mu1, mu2;       // over the samplers' output cube
  Rational delta_mu;           // d_tv(mu1, mu2)
  Distribution pi;             // stationary distribution on the closure
};
SdChainGadget sd_to_chain(const SamplerCircuit& c, const SamplerCircuit& cp, uint32_t m,
                          uint64_t t, std::optional<uint64_t> t_max, const Rational& gap_c,
                          const Rational& delta);

// (1/2) ((m-2)/m)^(t-1) * Delta.
Rational closed_form_distance(uint32_t m, uint64_t t, const Rational& delta_mu);

// ---- CNF formulas and the hypercube gadget ----

struct CnfFormula {
  uint32_t variables = 0;
  std::vector<std::vector<int32_t>> clauses;  // 1-based, negative = negated

  bool eval(uint64_t assignment) const;
  uint64_t count_satisfying() const;  // enumerates 2^variables
  std::optional<uint64_t> first_satisfying() const;
  void validate() const;
};

// Weighted hypercube: unit edges, self loop n^d at satisfying assignments
// and n elsewhere. Instance: x = 0^n, t = ceil(n (ln n + ln(4/(1-4delta)))),
// t_max = 32 n^(2d+1).
PromiseInstance unsat_to_chain(const CnfFormula& psi, uint32_t d, const Rational& delta,
                               const Rational& gap_c = 1);

// ---- Toy space-bounded machines and the configuration-graph gadget ----

// A tiny deterministic machine over a fixed-length binary tape. Rules are
// looked up by (control state, symbol, at-left-end, at-right-end). Entering
// the accept or reject control state clears the tape and homes the head, so
// the halting configurations are unique.
struct ToyMachine {
  struct Rule {
    uint8_t write = 0;
    int8_t move = 0;  // -1, 0, +1 (clamped at the ends)
    uint16_t next = 0;
  };
  std::string name;
  uint16_t num_states = 0;
  uint16_t q_start = 0, q_acc = 0, q_rej = 0;
  uint32_t tape_len = 0;
  // rules[((q * 2 + sym) * 2 + at_left) * 2 + at_right]
  std::vector<Rule> rules;

  const Rule& rule(uint16_t q, uint8_t sym, bool at_left, bool at_right) const;
  void validate() const;
  uint32_t head_bits() const;
  uint32_t control_bits() const;
  uint32_t config_bits() const;  // tape + head + control
  bool accepts(uint64_t input_tape, uint64_t step_cap = 1 << 20) const;
};

namespace toy_machines {
ToyMachine parity_checker(uint32_t tape_len);     // accept iff even parity
ToyMachine match_ends(uint32_t tape_len);         // accept iff first == last bit
ToyMachine single_step(uint32_t tape_len);        // accepts immediately
}  // namespace toy_machines

struct TmGadget {
  PromiseInstance instance;
  uint32_t degree_bound = 0;  // D
  BigInt w;
  uint32_t s_start = 0, s_acc = 0, s_rej = 0;  // state indices
  bool machine_accepts = false;
};
// Weighted configuration-graph chain: machine-step edges and self loops of
// weight w = ceil(1000 D^3 c 2^(3n) / (1-4delta)), the rej-start edge of
// weight w, and the single rej-acc edge of weight 1. GTC instance with
// t = ceil(10 D^3 2^(3n) / (1-4delta)), start s_start.
TmGadget tm_to_chain(const ToyMachine& machine, uint64_t input_tape, const Rational& gap_c,
                     const Rational& delta);

// ---- Dyadic circuit emission for matrix-backed chains ----

// Rounds each row to frac_bits fractional bits (largest-remainder
// renormalization keeps rows exactly stochastic) and compiles a gate-list
// circuit realizing the rounded chain. frac_bits = 0 picks the smallest
// width >= 30 that keeps every nonzero probability nonzero.
ChainCircuit compile_chain_circuit(const TransitionMatrix& p, uint32_t frac_bits = 0);
// The rounded chain itself (what the compiled circuit realizes).
TransitionMatrix rounded_chain(const TransitionMatrix& p, uint32_t frac_bits = 0);
uint32_t dyadic_bits_needed(const TransitionMatrix& p, uint32_t min_bits = 30);

// ---- The chain -> statistical-distance reduction ----

struct SdFromChain {
  SamplerCircuit c, cp;       // t-step and tau-step unrollings, equal widths
  Rational c_thresh, s_thresh;
  bool szk_regime = false;    // (1/4 + delta - 1/k)^2 > 1/4 - delta + 1/k
  uint32_t k = 0;
  uint64_t tau_used = 0;      // tau(1/k)
  Distribution dist_t, dist_tau;  // exact oracle distributions
  Rational exact_distance;        // d_tv between them
};
// Requires instance.circuit; unrolled widths must fit 64 input wires.
SdFromChain gptcs_to_sd(PromiseInstance& instance, uint32_t k);

// Unrolled sampler emitting the chain's state after `steps` moves from
// `start` (fresh randomness block per step).
SamplerCircuit unroll_chain(const ChainCircuit& chain, uint64_t start, uint64_t steps);
SamplerCircuit pad_sampler_inputs(const SamplerCircuit& s, uint32_t in_bits);

// ---- The composed round for worst-start convergence ----

// One round of the complement-certifying protocol: the prover exhibits a
// state pair, the verifier samples from one of the two t-step distributions
// and accepts iff the prover identifies the source. Accepting means "the
// verifier is convinced the chain is far from mixed at t": honest acceptance
// is exactly 1/2 + d_tv of the exhibited pair.
struct GptcRound {
  bool accepted = false;
  uint32_t pair_x = 0, pair_y = 0;
  Rational pair_distance;
};
GptcRound gptc_coam_round(const PromiseInstance& instance, uint64_t seed,
                          std::optional<std::pair<uint32_t, uint32_t>> forced_pair = {});

// ---- Exact decision oracle ----

enum class Decision { Yes, No, Gap, PromiseViolated };
const char* decision_name(Decision d);

struct DecideReport {
  Decision decision = Decision::Gap;
  std::string reason;
  ArithMode mode = ArithMode::Exact;
  std::optional<uint64_t> tau_low;   // tau(1/4 - delta) when resolved
  std::optional<uint64_t> tau_high;  // tau(1/4 + delta) when resolved
  std::optional<uint64_t> tau_quarter;
};

// Promise check (ergodicity; tau(1/4) <= t_max for the unary kinds), then
// YES iff tau(1/4-delta) < t and NO iff tau(1/4+delta) > c t, measured from
// the start state for GPTCS and over worst pairs otherwise.
DecideReport exact_decide(PromiseInstance& instance,
                          std::optional<ArithMode> forced_mode = {});

}  // namespace mixgap
