#include "mixgap/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "mixgap/errors.hpp"
#include "mixgap/parallel.hpp"
#include "mixgap/rng.hpp"

namespace mixgap {

uint64_t EstimatorConfig::paper_runs(uint32_t state_bits, double delta) {
  if (delta <= 0 || delta > 0.25)
    throw std::invalid_argument("estimator: delta must lie in (0, 1/4]");
  return static_cast<uint64_t>(std::ceil(48.0 * state_bits / (delta * delta)));
}

EstimatorConfig EstimatorConfig::paper_default(uint32_t state_bits, double delta,
                                               uint64_t t, uint64_t seed) {
  EstimatorConfig c;
  c.delta = delta;
  c.runs = paper_runs(state_bits, delta);
  c.seed = seed;
  c.t = t;
  return c;
}

Rational EmpiricalProfile::frequency(uint32_t x, uint32_t z) const {
  return Rational(counts[x][z], runs);
}

Rational EmpiricalProfile::pair_distance(uint32_t x, uint32_t y) const {
  uint64_t sum = 0;
  const auto& cx = counts[x];
  const auto& cy = counts[y];
  for (size_t z = 0; z < cx.size(); ++z)
    sum += cx[z] > cy[z] ? cx[z] - cy[z] : cy[z] - cx[z];
  return Rational(sum, 2 * BigInt(runs));
}

Rational EmpiricalProfile::d_hat() const { return d_hat(nullptr, nullptr); }

Rational EmpiricalProfile::d_hat(uint32_t* wx, uint32_t* wy) const {
  uint64_t best = 0;
  uint32_t bx = 0, by = 0;
  const size_t n = counts.size();
  for (size_t x = 0; x < n; ++x)
    for (size_t y = x + 1; y < n; ++y) {
      uint64_t sum = 0;
      const auto& cx = counts[x];
      const auto& cy = counts[y];
      for (size_t z = 0; z < cx.size(); ++z)
        sum += cx[z] > cy[z] ? cx[z] - cy[z] : cy[z] - cx[z];
      if (sum > best) {
        best = sum;
        bx = static_cast<uint32_t>(x);
        by = static_cast<uint32_t>(y);
      }
    }
  if (wx) *wx = bx;
  if (wy) *wy = by;
  return Rational(best, 2 * BigInt(runs));
}

void check_simulation_budget(size_t states, uint64_t runs, uint64_t t, uint64_t cap) {
  if (runs == 0) throw std::invalid_argument("estimator: runs must be positive");
  long double work = static_cast<long double>(states) * runs * std::max<uint64_t>(t, 1);
  if (work > static_cast<long double>(cap))
    throw std::length_error("estimator: |Omega| * runs * t exceeds the work budget");
}

namespace {

// 64 trajectories from one start, advanced in lockstep with wire-per-word
// evaluation; lanes beyond `lanes` are computed but discarded.
void run_block(const ChainCircuit& circuit, uint64_t start_pattern, uint64_t seed,
               uint32_t x_index, uint64_t trial_base, uint64_t lanes, uint64_t t,
               std::vector<uint64_t>& state_words, std::vector<uint64_t>& in,
               std::vector<uint64_t>& out, std::vector<uint64_t>& scratch,
               uint64_t rand_lane[64]) {
  const uint32_t n = circuit.state_bits;
  const uint32_t m = circuit.rand_bits;
  state_words.assign(n, 0);
  for (uint32_t b = 0; b < n; ++b)
    state_words[b] = ((start_pattern >> b) & 1) ? ~0ULL : 0;

  for (uint64_t step = 0; step < t; ++step) {
    for (uint64_t l = 0; l < 64; ++l)
      rand_lane[l] = l < lanes
                         ? counter_rand(seed, (static_cast<uint64_t>(x_index) << 32) | step,
                                        trial_base + l, 0x7261ULL)
                         : 0;
    transpose64(rand_lane);
    // After transposing, word b holds bit b of each lane's draw.
    for (uint32_t b = 0; b < n; ++b) in[b] = state_words[b];
    for (uint32_t b = 0; b < m; ++b) in[n + b] = rand_lane[b];
    circuit.body.eval_batch(in, out, scratch);
    for (uint32_t b = 0; b < n; ++b) state_words[b] = out[b];
  }
}

}  // namespace

EmpiricalProfile simulate_frequencies(const ChainCircuit& circuit, const SpaceRef& space,
                                      uint64_t t, const EstimatorConfig& config) {
  const uint32_t n = circuit.state_bits;
  const size_t states = space->size();
  check_simulation_budget(states, config.runs, t);

  // Dense pattern -> index table for the tally loop.
  if (space->width() > 24) throw std::length_error("estimator: state width beyond tally cap");
  std::vector<int32_t> index_table(1ULL << space->width(), -1);
  for (size_t i = 0; i < states; ++i)
    index_table[space->pattern(i)] = static_cast<int32_t>(i);

  EmpiricalProfile profile;
  profile.space = space;
  profile.runs = config.runs;
  profile.t = t;
  profile.seed = config.seed;
  profile.counts.assign(states, std::vector<uint32_t>(states, 0));

  parallel_for(states, [&](size_t lo, size_t hi) {
    std::vector<uint64_t> state_words, in(n + circuit.rand_bits), out(n), scratch;
    uint64_t rand_lane[64];
    for (size_t x = lo; x < hi; ++x) {
      uint64_t start = space->pattern(x);
      auto& row = profile.counts[x];
      for (uint64_t base = 0; base < config.runs; base += 64) {
        uint64_t lanes = std::min<uint64_t>(64, config.runs - base);
        run_block(circuit, start, config.seed, static_cast<uint32_t>(x), base, lanes, t,
                  state_words, in, out, scratch, rand_lane);
        for (uint64_t l = 0; l < lanes; ++l) {
          uint64_t z = 0;
          for (uint32_t b = 0; b < n; ++b) z |= ((state_words[b] >> l) & 1) << b;
          int32_t idx = index_table[z];
          if (idx < 0)
            throw ClosureError("trajectory left the enumerated state space");
          ++row[static_cast<size_t>(idx)];
        }
      }
    }
  });
  return profile;
}

bool gtc_accept_by_sampling(const EmpiricalProfile& profile) {
  return profile.d_hat() <= Rational(1, 4);
}

}  // namespace mixgap
