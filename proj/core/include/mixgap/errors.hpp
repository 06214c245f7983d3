#pragma once

#include <stdexcept>
#include <string>

namespace mixgap {

// The instance breaks a promise (non-ergodic chain, tau(1/4) > t_max, ...).
struct PromiseViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A circuit stepped outside the enumerated state space.
struct ClosureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A search hit its cap without an answer; carries the last d value seen.
struct UnresolvedError : std::runtime_error {
  UnresolvedError(const std::string& what, double last_distance)
      : std::runtime_error(what), last_distance(last_distance) {}
  double last_distance;
};

}  // namespace mixgap
