#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mixgap/matrix.hpp"

namespace mixgap {

enum class ArithMode { Exact, Float };

// Half the L1 distance; exact.
Rational tv_distance(const Distribution& mu, const Distribution& nu);
double tv_distance_float(const std::vector<double>& mu, const std::vector<double>& nu);

struct PairWitness {
  uint32_t x = 0;
  uint32_t y = 0;
};

// d(t) = max over state pairs of the TV distance between rows of P^t.
Rational d_of_t_exact(const TransitionMatrix& p, uint64_t t, PairWitness* witness = nullptr);
double d_of_t_float(const TransitionMatrix& p, uint64_t t, PairWitness* witness = nullptr);
// Same maximum read off an already-computed power of P.
Rational d_from_power(const ScaledMatrix& pt, PairWitness* witness = nullptr);

// Least t <= t_cap with d(t) <= eps. Monotonicity of d justifies a doubling
// scan followed by a binary search over the power ladder. Throws
// UnresolvedError (carrying the last d seen) when the cap is hit.
uint64_t tau(const TransitionMatrix& p, const Rational& eps, uint64_t t_cap,
             ArithMode mode = ArithMode::Exact);

// Least t <= t_cap with d_tv(P^t(x,.), pi) <= eps.
uint64_t tau_from(const TransitionMatrix& p, uint32_t x, const Rational& eps,
                  uint64_t t_cap, ArithMode mode = ArithMode::Exact);

uint64_t default_tau_cap(const TransitionMatrix& p);  // 10 |Omega|^3

// Float-mode tau whose answer is certified exact: d(tau-1) and d(tau) must
// both sit further than `margin` from eps, so double rounding cannot have
// moved the crossing. Rational powering at astronomical horizons is not
// an option; this keeps those searches honest.
struct CertifiedTau {
  uint64_t tau = 0;
  bool certified = false;
  double gap_before = 0;  // d(tau-1) - eps, positive when certified
  double gap_after = 0;   // eps - d(tau), nonnegative when certified
};
CertifiedTau tau_certified(const TransitionMatrix& p, const Rational& eps, uint64_t t_cap,
                           double margin = 1e-9);

struct MixingProfile {
  std::vector<Rational> d_values;                 // d(0) .. d(T)
  std::map<Rational, uint64_t> tau_table;         // eps -> tau
  std::map<Rational, std::vector<uint64_t>> tau_x_table;  // eps -> per-state tau_x
};

// Sequential scan up to horizon T (exact); taus resolved within the scan or
// by the ladder search beyond it.
MixingProfile build_mixing_profile(const TransitionMatrix& p, uint64_t horizon,
                                   const std::vector<Rational>& eps_values,
                                   bool per_state = false, uint64_t t_cap = 0);

}  // namespace mixgap
