#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mixgap/circuit.hpp"
#include "mixgap/rational.hpp"
#include "mixgap/state_space.hpp"

namespace mixgap {

// Keep the estimator decoupled from the matrix layer: a shared space handle.
using SpaceRef = std::shared_ptr<const StateSpace>;

// Run budget for the empirical distance estimator. The paper-default run
// count is 48 n / delta^2 with n the state-bit width of the circuit (not
// |Omega|). Space-precision error is zero here: frequencies are exact
// counts, so the paper's delta/4 + delta/4 error split collapses to the
// sampling term alone.
struct EstimatorConfig {
  double delta = 0.1;
  uint64_t runs = 0;
  uint64_t seed = 0;
  uint64_t t = 1;

  static uint64_t paper_runs(uint32_t state_bits, double delta);
  static EstimatorConfig paper_default(uint32_t state_bits, double delta, uint64_t t,
                                       uint64_t seed);
};

// Observed end-state counts per start state: f_{x,z} = counts[x][z] / runs.
struct EmpiricalProfile {
  SpaceRef space;  // see below
  uint64_t runs = 0;
  uint64_t t = 0;
  uint64_t seed = 0;
  std::vector<std::vector<uint32_t>> counts;

  Rational frequency(uint32_t x, uint32_t z) const;
  // M^t_{xy} = 1/2 sum_z |f_xz - f_yz|, exact over the recorded counts.
  Rational pair_distance(uint32_t x, uint32_t y) const;
  Rational d_hat() const;
  Rational d_hat(uint32_t* wx, uint32_t* wy) const;
};

// N trajectories of t steps from every start state; randomness is drawn per
// (seed, start, trial, step), so any execution order gives identical counts.
EmpiricalProfile simulate_frequencies(const ChainCircuit& circuit, const SpaceRef& space,
                                      uint64_t t, const EstimatorConfig& config);

// Accept iff d_hat(t) <= 1/4.
bool gtc_accept_by_sampling(const EmpiricalProfile& profile);

// Work guard: |Omega| * runs * t capped (resource error beyond).
void check_simulation_budget(size_t states, uint64_t runs, uint64_t t,
                             uint64_t cap = 6'000'000'000ULL);

}  // namespace mixgap
