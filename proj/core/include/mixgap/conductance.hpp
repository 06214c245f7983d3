#pragma once

#include <cstdint>
#include <vector>

#include "mixgap/matrix.hpp"

namespace mixgap {

struct ConductanceReport {
  Rational phi;                    // min over evaluated cuts of cross / volume
  std::vector<uint32_t> witness;   // achieving subset (state indices, ascending)
  // Same minimum restricted to sets holding at most half the total degree
  // (the convention the mixing literature uses; never smaller than phi).
  Rational phi_balanced;
  std::vector<uint32_t> witness_balanced;
  Rational pi_min;                 // min weighted-degree share
  bool exact = true;               // false for cuts mode (upper bound only)
  uint64_t cuts_evaluated = 0;
};

// Exact conductance by enumerating every proper nonempty subset (Gray-code
// walk); requires weights and |Omega| <= max_states.
ConductanceReport conductance_exact(const TransitionMatrix& p, size_t max_states = 24);

// Evaluate only the supplied subsets; the result upper-bounds the true
// conductance and is flagged exact = false.
ConductanceReport conductance_cuts(const TransitionMatrix& p,
                                   const std::vector<std::vector<uint32_t>>& cuts);

// tau(eps) <= (2/phi^2) ln(2/(pi_min eps)); natural log.
double conductance_mixing_bound(const ConductanceReport& report, double eps);
double conductance_mixing_bound(const Rational& phi, const Rational& pi_min, double eps);

}  // namespace mixgap
